#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "duokg/common.hpp"
#include "duokg/rng.hpp"

namespace duokg::nn {

/// Row-major matrix shape; column vectors have cols == 1.
struct Shape {
    std::size_t rows = 0;
    std::size_t cols = 1;

    std::size_t size() const { return rows * cols; }
    bool is_vector() const { return cols == 1; }
    bool is_scalar() const { return rows == 1 && cols == 1; }
    bool operator==(const Shape&) const = default;
    std::string str() const { return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]"; }
};

struct Tensor {
    Shape shape;
    std::vector<double> values;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(s), values(s.size(), 0.0) {}
    Tensor(Shape s, std::vector<double> v);

    double& at(std::size_t r, std::size_t c) { return values[r * shape.cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * shape.cols + c]; }
};

struct ParamId {
    std::uint32_t index = 0;
    bool operator==(const ParamId&) const = default;
};

/// Gradient slots aligned with a ParamStore.
struct Gradients {
    std::vector<std::vector<double>> slots;

    void zero();
    /// this += other, slot by slot in index order.
    void accumulate(const Gradients& other);
    bool all_finite() const;
};

/// Named parameters plus same-shape gradient accumulators.
class ParamStore {
public:
    explicit ParamStore(std::uint64_t seed = 0) : rng_(seed) {}

    ParamId add(const std::string& name, Shape shape);
    /// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) with fan_in = cols.
    ParamId add_uniform(const std::string& name, Shape shape);
    ParamId add_tensor(const std::string& name, Tensor tensor);

    ParamId id(const std::string& name) const;
    bool contains(const std::string& name) const { return by_name_.contains(name); }

    std::size_t count() const { return tensors_.size(); }
    std::size_t total_size() const;
    const std::string& name(ParamId p) const { return names_.at(p.index); }
    const Tensor& tensor(ParamId p) const { return tensors_.at(p.index); }
    Tensor& tensor(ParamId p) { return tensors_.at(p.index); }
    std::span<const double> values(ParamId p) const { return tensors_.at(p.index).values; }
    std::span<double> values(ParamId p) { return tensors_.at(p.index).values; }
    Shape shape(ParamId p) const { return tensors_.at(p.index).shape; }

    Gradients& grads() { return grads_; }
    const Gradients& grads() const { return grads_; }
    /// Fresh zeroed buffer with the store's layout.
    Gradients make_gradients() const;
    void zero_grad() { grads_.zero(); }

    Rng& rng() { return rng_; }

    /// FNV-1a over the raw parameter bytes; used to prove parameters did not move.
    std::uint64_t fingerprint() const;

private:
    std::vector<std::string> names_;
    std::vector<Tensor> tensors_;
    std::unordered_map<std::string, std::uint32_t> by_name_;
    Gradients grads_;
    Rng rng_;
};

/// Throws NumericError if any value is NaN or infinite.
void require_finite(std::span<const double> values, const char* where);

}  // namespace duokg::nn
