#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nae/image.hpp"
#include "nae/nn/unet.hpp"
#include "nae/train/adam.hpp"
#include "nae/train/config.hpp"

namespace nae {

/// One dataset entry as the trainer sees it: an image and its (possibly
/// noisy) annotations. Ground truth never enters here.
struct TrainSample {
    ImageGrid image;
    PointSet annotations;
};

struct EpochMetrics {
    int64_t epoch = 0;
    double mean_loss = 0.0;        // per-image losses averaged over the epoch
    double holdout_err_px = 0.0;   // NaN when there is no holdout slice
    int steps = 0;                 // optimizer steps taken
    int skipped_steps = 0;         // batches skipped (all-empty or non-finite grads)
};

struct TrainState {
    UNet net;
    AdamState opt;
    int64_t epoch = 0;
};

TrainState init_train_state(const ModelConfig& model, const TrainConfig& config);

/// Runs one epoch: shuffle, then per batch augment -> regenerate noise on
/// the augmented geometry -> forward -> loss -> backward -> optimizer step.
/// Noise substreams are keyed by (seed, image index, epoch), so every epoch
/// draws fresh offsets and reruns are bit-identical.
EpochMetrics train_epoch(std::span<const TrainSample> train_data,
                         std::span<const TrainSample> holdout_data, TrainState& state,
                         const TrainConfig& config);

/// Mean distance between restored noised annotations and the originals,
/// with per-sample fixed noise streams (comparable across epochs). NaN when
/// nothing qualifies.
double holdout_error(const UNet& net, std::span<const TrainSample> holdout,
                     const TrainConfig& config);

using EpochLogger = std::function<void(const EpochMetrics&)>;

struct TrainResult {
    TrainState state;
    std::vector<EpochMetrics> history;
};

/// Full training run: splits off the holdout slice, initializes the model
/// from the config seed, and iterates epochs.
TrainResult train(const std::vector<TrainSample>& data, const ModelConfig& model,
                  const TrainConfig& config, const EpochLogger& log = {});

}  // namespace nae
