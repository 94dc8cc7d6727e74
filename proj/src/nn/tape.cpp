#include "duokg/nn/tape.hpp"

namespace duokg::nn {

Tape::Tape(const ParamStore* params, bool record_gradients) : params_(params), record_(record_gradients) {
    nodes_.reserve(256);
    if (params_) param_nodes_.assign(params_->count(), -1);
}

Var Tape::constant(Shape shape, std::vector<double> values) {
    if (values.size() != shape.size()) {
        throw ShapeError("constant: " + std::to_string(values.size()) + " values for shape " + shape.str());
    }
    require_finite(values, "constant");
    Node n;
    n.shape = shape;
    n.value = std::move(values);
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::constant(std::span<const double> vector) {
    return constant(Shape{vector.size(), 1}, std::vector<double>(vector.begin(), vector.end()));
}

Var Tape::scalar(double value) { return constant(Shape{1, 1}, {value}); }

Var Tape::zeros(std::size_t n) { return constant(Shape{n, 1}, std::vector<double>(n, 0.0)); }

Var Tape::param(ParamId p) {
    if (!params_) throw std::logic_error("tape has no parameter store");
    auto& slot = param_nodes_.at(p.index);
    if (slot >= 0) return Var{static_cast<std::uint32_t>(slot)};
    Node n;
    n.shape = params_->shape(p);
    n.param = static_cast<std::int32_t>(p.index);
    n.requires_grad = record_;
    nodes_.push_back(std::move(n));
    slot = static_cast<std::int32_t>(nodes_.size() - 1);
    return Var{static_cast<std::uint32_t>(slot)};
}

std::span<const double> Tape::value(Var v) const {
    const auto& n = nodes_[v.id];
    if (n.param >= 0) return params_->values(ParamId{static_cast<std::uint32_t>(n.param)});
    return n.value;
}

double Tape::item(Var v) const {
    const auto& n = nodes_[v.id];
    if (!n.shape.is_scalar()) throw ShapeError("item() on non-scalar " + n.shape.str());
    return value(v)[0];
}

Var Tape::emit(const char* op, Shape shape, std::vector<double> value, bool requires_grad, Backward backward) {
    require_finite(value, op);
    Node n;
    n.shape = shape;
    n.value = std::move(value);
    n.requires_grad = requires_grad && record_;
    if (n.requires_grad) n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

std::span<double> Tape::grad(Var v) {
    auto& n = nodes_[v.id];
    if (n.param >= 0) return sink_->slots[static_cast<std::size_t>(n.param)];
    return n.grad;
}

void Tape::backward(Var root, Gradients& sink) {
    if (!nodes_[root.id].shape.is_scalar()) throw ShapeError("backward() needs a scalar root");
    if (params_ && sink.slots.size() != params_->count()) throw ShapeError("gradient buffer layout mismatch");
    sink_ = &sink;
    for (std::size_t i = 0; i <= root.id; ++i) {
        auto& n = nodes_[i];
        if (n.requires_grad && n.param < 0) n.grad.assign(n.shape.size(), 0.0);
    }
    if (!nodes_[root.id].requires_grad) {
        sink_ = nullptr;
        return;
    }
    grad(root)[0] += 1.0;
    for (std::size_t i = root.id + 1; i-- > 0;) {
        auto& n = nodes_[i];
        if (n.requires_grad && n.backward) n.backward(*this, Var{static_cast<std::uint32_t>(i)});
    }
    sink_ = nullptr;
}

}  // namespace duokg::nn
