#pragma once

#include <functional>
#include <vector>

#include "duokg/nn/tape.hpp"

namespace duokg::nn {

/// Builds a scalar on the given tape from the store's current values.
using ScalarFunction = std::function<Var(Tape&)>;

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t entries_checked = 0;
    std::string worst_parameter;
};

/// Compares reverse-mode gradients with fourth-order central differences over every entry of
/// the listed parameters (all parameters when the list is empty). The relative
/// error of one entry is |g_ad - g_fd| / max(floor, |g_ad| + |g_fd|).
///
/// The floor matters for deep networks: an entry of size 1e-9 in an O(1)
/// objective is below what a finite difference resolves in double precision.
GradCheckResult grad_check(ParamStore& store, const ScalarFunction& f, double eps = 1e-5,
                           const std::vector<ParamId>& params = {}, double floor = 1e-8);

}  // namespace duokg::nn
