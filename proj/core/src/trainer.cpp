#include "nae/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nae/noise.hpp"
#include "nae/train/augment.hpp"
#include "nae/vector_field.hpp"

namespace nae {
namespace {

void shuffle_indices(std::vector<size_t>& idx, Rng& rng) {
    for (size_t i = idx.size(); i > 1; --i) {
        const auto j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1));
        std::swap(idx[i - 1], idx[j]);
    }
}

}  // namespace

TrainState init_train_state(const ModelConfig& model, const TrainConfig& config) {
    config.validate(model);
    TrainState state;
    state.net = UNet::init(model, config.seed);
    state.opt = AdamState::for_params(state.net.params);
    return state;
}

EpochMetrics train_epoch(std::span<const TrainSample> train_data,
                         std::span<const TrainSample> holdout_data, TrainState& state,
                         const TrainConfig& config) {
    if (train_data.empty()) throw ConfigError("training dataset is empty");
    const auto epoch = static_cast<uint64_t>(state.epoch);

    std::vector<size_t> order(train_data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng order_rng(derive_stream(config.seed, stream::kOrder, epoch));
    shuffle_indices(order, order_rng);

    EpochMetrics metrics;
    metrics.epoch = state.epoch;
    double loss_sum = 0.0;

    std::vector<Tensor4> grads;
    grads.reserve(state.net.params.size());
    for (const NamedTensor& p : state.net.params) {
        grads.emplace_back(p.tensor.n, p.tensor.c, p.tensor.h, p.tensor.w);
    }

    const auto batch = static_cast<size_t>(config.batch_size);
    for (size_t begin = 0; begin < order.size(); begin += batch) {
        const size_t end = std::min(begin + batch, order.size());
        const double inv_b = 1.0 / static_cast<double>(end - begin);
        for (Tensor4& g : grads) std::fill(g.data.begin(), g.data.end(), 0.0f);
        int contributing = 0;

        for (size_t k = begin; k < end; ++k) {
            const size_t idx = order[k];
            const TrainSample& sample = train_data[idx];
            Rng rng(derive_stream(config.seed, stream::kTrainImage, idx, epoch));

            AugmentResult aug = augment(sample.image, sample.annotations, config, rng);
            if (!aug.points.has_distances()) continue;  // < 2 points: zero loss

            const SamplingBounds bounds =
                make_bounds(aug.points, aug.image.height, config.bound_mode, config.alpha,
                            config.allow_overlap);
            const NoisedPointSet noised =
                make_noised(aug.points, bounds, aug.image.width, aug.image.height, rng);

            Tape<float> tape;
            const auto fwd =
                unet_forward(tape, state.net, image_to_tensor<float>(aug.image), true);
            const auto pred = bilinear_gather<float>(tape, fwd.field, noised.noised);

            const int n_pts = static_cast<int>(noised.size());
            Tensor4 target(1, 2, 1, n_pts);
            for (int j = 0; j < n_pts; ++j) {
                target.at(0, 0, 0, j) = static_cast<float>(-noised.effective[j].x);
                target.at(0, 1, 0, j) = static_cast<float>(-noised.effective[j].y);
            }
            const auto loss = offset_mse(tape, pred, target);
            tape.backward(loss, static_cast<float>(inv_b));

            loss_sum += tape.value(loss).data[0];
            ++contributing;
            for (size_t i = 0; i < grads.size(); ++i) {
                const Tensor4& g = tape.grad(fwd.param_vars[i]);
                if (g.empty()) continue;
                for (size_t j = 0; j < g.size(); ++j) grads[i].data[j] += g.data[j];
            }
        }

        if (contributing == 0) {
            ++metrics.skipped_steps;
            continue;
        }
        AdamConfig opt_cfg;
        opt_cfg.learning_rate = config.learning_rate;
        opt_cfg.weight_decay = config.weight_decay;
        if (adam_step(state.net.params, grads, state.opt, opt_cfg)) {
            ++metrics.steps;
        } else {
            ++metrics.skipped_steps;
        }
    }

    metrics.mean_loss = loss_sum / static_cast<double>(train_data.size());
    metrics.holdout_err_px = holdout_error(state.net, holdout_data, config);
    state.epoch += 1;
    return metrics;
}

double holdout_error(const UNet& net, std::span<const TrainSample> holdout,
                     const TrainConfig& config) {
    double err_sum = 0.0;
    size_t n_points = 0;
    for (size_t k = 0; k < holdout.size(); ++k) {
        const TrainSample& sample = holdout[k];
        if (!sample.annotations.has_distances()) continue;
        Rng rng(derive_stream(config.seed, stream::kHoldout, k));
        const SamplingBounds bounds =
            make_bounds(sample.annotations, sample.image.height, config.bound_mode,
                        config.alpha, config.allow_overlap);
        const NoisedPointSet noised = make_noised(sample.annotations, bounds,
                                                  sample.image.width, sample.image.height, rng);
        const VectorField field = infer_field(net, sample.image);
        const PointSet restored = restore(PointSet{noised.noised, {}}, field);
        for (size_t i = 0; i < restored.size(); ++i) {
            err_sum += distance(restored.points[i], sample.annotations.points[i]);
        }
        n_points += restored.size();
    }
    if (n_points == 0) return std::numeric_limits<double>::quiet_NaN();
    return err_sum / static_cast<double>(n_points);
}

TrainResult train(const std::vector<TrainSample>& data, const ModelConfig& model,
                  const TrainConfig& config, const EpochLogger& log) {
    config.validate(model);
    if (data.empty()) throw ConfigError("training dataset is empty");

    size_t holdout_n = 0;
    if (data.size() >= 5 && config.holdout_fraction > 0.0) {
        holdout_n = static_cast<size_t>(
            std::lround(static_cast<double>(data.size()) * config.holdout_fraction));
        holdout_n = std::clamp<size_t>(holdout_n, 1, data.size() - 1);
    }
    const std::span<const TrainSample> train_slice(data.data(), data.size() - holdout_n);
    const std::span<const TrainSample> holdout_slice(data.data() + train_slice.size(),
                                                     holdout_n);

    TrainResult result;
    result.state = init_train_state(model, config);
    result.history.reserve(static_cast<size_t>(config.epochs));
    for (int e = 0; e < config.epochs; ++e) {
        EpochMetrics m = train_epoch(train_slice, holdout_slice, result.state, config);
        if (log) log(m);
        result.history.push_back(m);
    }
    return result;
}

}  // namespace nae
