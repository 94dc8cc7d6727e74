#include <cmath>
#include <string>

#include "duokg/common.hpp"
#include "duokg/nn/sampling.hpp"

namespace duokg::nn {

namespace {

void validate(std::span<const double> p) {
    if (p.empty()) throw ShapeError("categorical distribution over zero outcomes");
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw NumericError("categorical probability is negative or non-finite");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw NumericError("categorical probabilities sum to " + std::to_string(total));
    }
}

}  // namespace

std::size_t categorical_sample(std::span<const double> probabilities, Rng& rng) {
    validate(probabilities);
    const double u = rng.uniform();
    double cdf = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (probabilities[i] > 0.0) last_positive = i;
        cdf += probabilities[i];
        if (u < cdf && probabilities[i] > 0.0) return i;
    }
    // u landed in the rounding gap above the final cdf value
    return last_positive;
}

double categorical_log_prob(std::span<const double> probabilities, std::size_t index) {
    if (index >= probabilities.size()) throw ShapeError("categorical index out of range");
    const double p = probabilities[index];
    if (!(p > 0.0)) throw NumericError("log-probability of a zero-probability outcome");
    return std::log(p);
}

std::size_t argmax(std::span<const double> values) {
    if (values.empty()) throw ShapeError("argmax of an empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

}  // namespace duokg::nn
