#include "nae/train/adam.hpp"

#include <cmath>

namespace nae {

AdamState AdamState::for_params(const std::vector<NamedTensor>& params) {
    AdamState state;
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const NamedTensor& p : params) {
        const Tensor4& t = p.tensor;
        state.m.emplace_back(t.n, t.c, t.h, t.w);
        state.v.emplace_back(t.n, t.c, t.h, t.w);
    }
    return state;
}

bool adam_step(std::vector<NamedTensor>& params, const std::vector<Tensor4>& grads,
               AdamState& state, const AdamConfig& config) {
    if (grads.size() != params.size() || state.m.size() != params.size()) {
        throw ShapeError("optimizer state does not match parameter list");
    }
    for (size_t i = 0; i < params.size(); ++i) {
        if (!params[i].tensor.same_shape(grads[i])) {
            throw ShapeError("gradient shape mismatch for '" + params[i].name + "'");
        }
        for (const float g : grads[i].data) {
            if (!std::isfinite(g)) return false;
        }
    }

    state.step += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    const double decay = 1.0 - config.learning_rate * config.weight_decay;
    for (size_t i = 0; i < params.size(); ++i) {
        float* p = params[i].tensor.data.data();
        const float* g = grads[i].data.data();
        float* m = state.m[i].data.data();
        float* v = state.v[i].data.data();
        const size_t n = params[i].tensor.size();
        for (size_t j = 0; j < n; ++j) {
            const double gj = g[j];
            const double mj = config.beta1 * m[j] + (1.0 - config.beta1) * gj;
            const double vj = config.beta2 * v[j] + (1.0 - config.beta2) * gj * gj;
            m[j] = static_cast<float>(mj);
            v[j] = static_cast<float>(vj);
            const double update = (mj / bc1) / (std::sqrt(vj / bc2) + config.eps);
            p[j] = static_cast<float>(p[j] * decay - config.learning_rate * update);
        }
    }
    return true;
}

}  // namespace nae
