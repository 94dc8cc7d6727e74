#pragma once

#include <vector>

#include "duokg/nn/tensor.hpp"

namespace duokg::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam on a minimization objective: params -= lr * m_hat / (sqrt(v_hat) + eps).
class Adam {
public:
    Adam(const ParamStore& store, AdamConfig config);

    void step(ParamStore& store, const Gradients& grads);
    /// Restrict the update to a subset of parameters (others keep their values).
    void set_trainable(const ParamStore& store, const std::vector<ParamId>& params);

    std::size_t steps() const { return t_; }
    const AdamConfig& config() const { return config_; }

private:
    AdamConfig config_;
    Gradients m_;
    Gradients v_;
    std::vector<bool> trainable_;
    std::size_t t_ = 0;
};

}  // namespace duokg::nn
