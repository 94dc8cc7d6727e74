#pragma once

#include <span>

#include "duokg/rng.hpp"

namespace duokg::nn {

/// Inverse-CDF draw over the given order. Probabilities must be nonnegative
/// and sum to 1 within 1e-9.
std::size_t categorical_sample(std::span<const double> probabilities, Rng& rng);

/// ln p[index]; a zero-probability index is an error rather than -inf.
double categorical_log_prob(std::span<const double> probabilities, std::size_t index);

/// Index of the largest entry, first one on ties.
std::size_t argmax(std::span<const double> values);

}  // namespace duokg::nn
