#include <cmath>

#include "duokg/nn/optim.hpp"

namespace duokg::nn {

Adam::Adam(const ParamStore& store, AdamConfig config)
    : config_(config), m_(store.make_gradients()), v_(store.make_gradients()), trainable_(store.count(), true) {
    if (!(config.lr > 0.0) || config.beta1 < 0.0 || config.beta1 >= 1.0 || config.beta2 < 0.0 ||
        config.beta2 >= 1.0 || !(config.eps > 0.0)) {
        throw ConfigError("adam: invalid hyperparameters");
    }
}

void Adam::set_trainable(const ParamStore& store, const std::vector<ParamId>& params) {
    trainable_.assign(store.count(), false);
    for (ParamId p : params) trainable_.at(p.index) = true;
}

void Adam::step(ParamStore& store, const Gradients& grads) {
    if (grads.slots.size() != store.count() || m_.slots.size() != store.count()) {
        throw ShapeError("adam: gradient layout does not match the parameter store");
    }
    if (!grads.all_finite()) throw NumericError("adam: non-finite gradient");
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::uint32_t i = 0; i < store.count(); ++i) {
        if (!trainable_[i]) continue;
        auto values = store.values(ParamId{i});
        const auto& g = grads.slots[i];
        auto& m = m_.slots[i];
        auto& v = v_.slots[i];
        for (std::size_t j = 0; j < values.size(); ++j) {
            m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g[j];
            v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g[j] * g[j];
            values[j] -= config_.lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + config_.eps);
        }
    }
}

}  // namespace duokg::nn
