#pragma once

#include <cstdint>
#include <vector>

#include "nae/nn/unet.hpp"

namespace nae {

struct AdamConfig {
    double learning_rate = 1e-4;
    double weight_decay = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Tensor4> m;  // first moments, shaped like params
    std::vector<Tensor4> v;  // second moments
    int64_t step = 0;

    static AdamState for_params(const std::vector<NamedTensor>& params);
};

/// One optimizer step with decoupled weight decay: parameters are scaled by
/// (1 - lr*wd) first, then updated by lr * m_hat / (sqrt(v_hat) + eps) with
/// the usual bias corrections. Returns false without touching params or
/// state if any gradient value is non-finite (the caller skips the step).
bool adam_step(std::vector<NamedTensor>& params, const std::vector<Tensor4>& grads,
               AdamState& state, const AdamConfig& config);

}  // namespace nae
