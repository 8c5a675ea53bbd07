#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nae/eval/metrics.hpp"
#include "nae/nn/unet.hpp"
#include "nae/synth/scene.hpp"
#include "nae/train/trainer.hpp"

namespace nae {

/// Loads an emitted dataset directory back into memory via its manifest.
std::vector<SceneSample> load_dataset(const std::string& dir);

/// Strips ground truth; what the trainer is allowed to see.
std::vector<TrainSample> to_train_samples(std::span<const SceneSample> scenes);

/// One inference pass: predicts the offset field and moves every annotation
/// by the field value sampled at its own position.
PointSet refine_points(const UNet& net, const ImageGrid& image, const PointSet& points);

/// Per-point restoration errors pooled across scenes: "before" measures the
/// stored annotations against truth, "after" measures them refined by the
/// model. Scene inference fans out over `threads`; pooling order is fixed by
/// scene index, so the result does not depend on thread count.
RestorationMetrics evaluate_scenes(const UNet& net, std::span<const SceneSample> scenes,
                                   MatchMode mode, int threads = 1);

struct SweepOutcome {
    RestorationMetrics metrics;
    std::string flag;  // empty, or "diverged" when an epoch loss went non-finite
};

/// One full generate -> train -> refine -> evaluate cycle at a given noise
/// level and sampling bound. Injected into the sweeps so tests can swap in a
/// cheap stand-in.
using SweepDriver = std::function<SweepOutcome(double beta, double alpha)>;

/// Configuration for the real driver. One seed (train.seed) keys scene
/// generation, jitter, weight init, and training noise through distinct
/// substreams, so a sweep is reproducible from a single number.
struct PipelineConfig {
    SceneSpec scene;
    int n_scenes = 200;
    ModelConfig model;
    TrainConfig train;
    MatchMode mode = MatchMode::indexed;
    int threads = 1;
    EpochLogger log;  // optional progress callback
};

/// Builds the generate/train/evaluate driver. Each invocation regenerates
/// the dataset from (seed, beta), trains a fresh model with the row's alpha,
/// and evaluates on the same scenes it trained on (the workflow refines the
/// annotations it was given, so train and eval sets coincide by design).
/// A non-finite epoch loss flags the row "diverged"; weights stay finite
/// because the optimizer rejects non-finite gradients, and the row is still
/// evaluated with the surviving weights.
SweepDriver make_pipeline_driver(const PipelineConfig& config);

/// Robustness protocol: one row per beta at fixed alpha. Rows appear in
/// input order; a diverged row is flagged and the sweep continues.
std::vector<ReportRow> robustness_sweep(std::span<const double> betas, double alpha,
                                        const SweepDriver& driver);

/// Sampling-bound ablation: one row per alpha at fixed beta. Because the
/// driver keys generation by (seed, beta) only, every row sees the identical
/// dataset; alpha values above 0.5 require the overlap override in the
/// driver's train config.
std::vector<ReportRow> alpha_ablation(std::span<const double> alphas, double beta,
                                      const SweepDriver& driver);

}  // namespace nae
