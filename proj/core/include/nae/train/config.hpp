#pragma once

#include <cstdint>

#include "nae/nn/unet.hpp"
#include "nae/sampling.hpp"

namespace nae {

struct TrainConfig {
    double learning_rate = 1e-4;
    double weight_decay = 5e-4;
    int epochs = 100;
    int batch_size = 8;
    int crop_size = 128;
    double scale_min = 0.7;
    double scale_max = 1.3;
    double flip_prob = 0.5;
    double alpha = 0.4;
    BoundMode bound_mode = BoundMode::perspective;
    bool allow_overlap = false;
    // Fraction of the dataset reserved for the per-epoch restoration metric.
    // Tiny datasets (fewer than 5 samples) train on everything and report no
    // holdout error.
    double holdout_fraction = 0.1;
    uint64_t seed = 0;

    /// Validates against the model the config will train.
    void validate(const ModelConfig& model) const {
        model.validate();
        if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
        if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
        if (epochs < 1) throw ConfigError("epochs must be >= 1");
        if (batch_size < 1) throw ConfigError("batch size must be >= 1");
        const int stride = 1 << model.stages();
        if (crop_size < stride || crop_size % stride != 0) {
            throw ConfigError("crop size must be a positive multiple of " +
                              std::to_string(stride) + " (the total downsampling factor)");
        }
        if (!(scale_min > 0.0) || scale_min > scale_max) {
            throw ConfigError("scale range must satisfy 0 < min <= max");
        }
        if (flip_prob < 0.0 || flip_prob > 1.0) throw ConfigError("flip probability outside [0, 1]");
        if (!(alpha > 0.0) || alpha > 1.0) throw ConfigError("alpha outside (0, 1]");
        if (alpha > 0.5 && !allow_overlap) {
            throw ConfigError("alpha > 0.5 produces overlapping sampling regions; "
                              "pass --allow-overlap to permit it");
        }
        if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
            throw ConfigError("holdout fraction outside [0, 1)");
        }
    }
};

}  // namespace nae
