#include <algorithm>
#include <cmath>

#include "duokg/nn/grad_check.hpp"

namespace duokg::nn {

namespace {

double evaluate(const ParamStore& store, const ScalarFunction& f) {
    Tape t(&store, false);
    return t.item(f(t));
}

}  // namespace

GradCheckResult grad_check(ParamStore& store, const ScalarFunction& f, double eps,
                           const std::vector<ParamId>& params, double floor) {
    Gradients g = store.make_gradients();
    {
        Tape t(&store, true);
        const Var y = f(t);
        t.backward(y, g);
    }
    if (!g.all_finite()) throw NumericError("grad_check: non-finite analytic gradient");

    std::vector<ParamId> ids = params;
    if (ids.empty()) {
        for (std::uint32_t i = 0; i < store.count(); ++i) ids.push_back(ParamId{i});
    }
    GradCheckResult result;
    for (ParamId p : ids) {
        auto values = store.values(p);
        for (std::size_t j = 0; j < values.size(); ++j) {
            const double saved = values[j];
            auto at = [&](double offset) {
                values[j] = saved + offset;
                return evaluate(store, f);
            };
            // fourth-order central stencil
            const double fd = (8.0 * (at(eps) - at(-eps)) - (at(2.0 * eps) - at(-2.0 * eps))) / (12.0 * eps);
            values[j] = saved;
            if (!std::isfinite(fd)) throw NumericError("grad_check: non-finite finite difference");
            const double ad = g.slots[p.index][j];
            const double err = std::abs(ad - fd) / std::max(floor, std::abs(ad) + std::abs(fd));
            ++result.entries_checked;
            if (err > result.max_relative_error) {
                result.max_relative_error = err;
                result.worst_parameter = store.name(p) + "[" + std::to_string(j) + "]";
            }
        }
    }
    return result;
}

}  // namespace duokg::nn
