#pragma once

#include <functional>
#include <span>
#include <vector>

#include "duokg/nn/tensor.hpp"

namespace duokg::nn {

/// Handle to a node on a Tape. Only meaningful for the tape that produced it.
struct Var {
    std::uint32_t id = 0;
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so a reverse
/// sweep visits every consumer before its inputs.
///
/// Parameter leaves alias ParamStore storage; their gradients flow into the
/// Gradients buffer passed to backward(), which lets many tapes share one
/// read-only ParamStore while each writes its own buffer.
class Tape {
public:
    using Backward = std::function<void(Tape&, Var out)>;

    /// With record_gradients=false, parameters are treated as constants and no
    /// backward closures are kept (inference and rollout collection).
    explicit Tape(const ParamStore* params = nullptr, bool record_gradients = true);

    Var constant(Shape shape, std::vector<double> values);
    Var constant(std::span<const double> vector);
    Var scalar(double value);
    Var zeros(std::size_t n);
    /// Leaf for a parameter; repeated calls return the same node.
    Var param(ParamId p);

    Shape shape(Var v) const { return nodes_[v.id].shape; }
    std::span<const double> value(Var v) const;
    double item(Var v) const;
    bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
    std::size_t size() const { return nodes_.size(); }
    const ParamStore* params() const { return params_; }

    /// Appends an op result. `backward` runs only when some input requires a gradient.
    Var emit(const char* op, Shape shape, std::vector<double> value, bool requires_grad, Backward backward);

    /// Gradient slot of a node; valid only while backward() is running.
    std::span<double> grad(Var v);

    /// Seeds d(root)=1 and accumulates parameter gradients into `sink`.
    void backward(Var root, Gradients& sink);

private:
    struct Node {
        Shape shape;
        std::vector<double> value;
        std::vector<double> grad;
        std::int32_t param = -1;
        bool requires_grad = false;
        Backward backward;
    };

    const ParamStore* params_;
    bool record_;
    std::vector<Node> nodes_;
    std::vector<std::int32_t> param_nodes_;
    Gradients* sink_ = nullptr;
};

}  // namespace duokg::nn
