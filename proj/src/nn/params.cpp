#include <cmath>
#include <cstring>

#include "duokg/nn/tensor.hpp"

namespace duokg::nn {

Tensor::Tensor(Shape s, std::vector<double> v) : shape(s), values(std::move(v)) {
    if (values.size() != shape.size()) {
        throw ShapeError("tensor value count " + std::to_string(values.size()) + " does not match shape " +
                         shape.str());
    }
}

void Gradients::zero() {
    for (auto& s : slots) std::fill(s.begin(), s.end(), 0.0);
}

void Gradients::accumulate(const Gradients& other) {
    if (other.slots.size() != slots.size()) throw ShapeError("gradient buffers have different layouts");
    for (std::size_t i = 0; i < slots.size(); ++i) {
        auto& dst = slots[i];
        const auto& src = other.slots[i];
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
}

bool Gradients::all_finite() const {
    for (const auto& s : slots)
        for (double v : s)
            if (!std::isfinite(v)) return false;
    return true;
}

ParamId ParamStore::add(const std::string& name, Shape shape) {
    return add_tensor(name, Tensor(shape));
}

ParamId ParamStore::add_uniform(const std::string& name, Shape shape) {
    Tensor t(shape);
    const double bound = 1.0 / std::sqrt(static_cast<double>(shape.cols));
    for (auto& v : t.values) v = rng_.uniform(-bound, bound);
    return add_tensor(name, std::move(t));
}

ParamId ParamStore::add_tensor(const std::string& name, Tensor tensor) {
    if (by_name_.contains(name)) throw std::invalid_argument("duplicate parameter name: " + name);
    require_finite(tensor.values, name.c_str());
    const auto index = static_cast<std::uint32_t>(tensors_.size());
    grads_.slots.emplace_back(tensor.values.size(), 0.0);
    tensors_.push_back(std::move(tensor));
    names_.push_back(name);
    by_name_.emplace(name, index);
    return ParamId{index};
}

ParamId ParamStore::id(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw std::out_of_range("unknown parameter: " + name);
    return ParamId{it->second};
}

std::size_t ParamStore::total_size() const {
    std::size_t n = 0;
    for (const auto& t : tensors_) n += t.values.size();
    return n;
}

Gradients ParamStore::make_gradients() const {
    Gradients g;
    g.slots.reserve(tensors_.size());
    for (const auto& t : tensors_) g.slots.emplace_back(t.values.size(), 0.0);
    return g;
}

std::uint64_t ParamStore::fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& t : tensors_) {
        for (double v : t.values) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            for (int b = 0; b < 8; ++b) {
                h ^= (bits >> (8 * b)) & 0xffu;
                h *= 1099511628211ULL;
            }
        }
    }
    return h;
}

void require_finite(std::span<const double> values, const char* where) {
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + where);
    }
}

}  // namespace duokg::nn
