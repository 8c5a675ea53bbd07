#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nae/errors.hpp"
#include "nae/image.hpp"
#include "nae/nn/ops.hpp"
#include "nae/nn/tape.hpp"
#include "nae/nn/tensor.hpp"
#include "nae/rng.hpp"
#include "nae/vector_field.hpp"

namespace nae {

/// Architecture of the encoder-decoder. Each encoder stage is one 3x3
/// conv + ReLU followed by 2x2 max pooling; the decoder mirrors it with
/// bilinear upsampling and skip concatenation; a zero-initialized 1x1 head
/// maps to the output channels, so a fresh model emits the all-zero field.
struct ModelConfig {
    int in_channels = 1;
    int out_channels = 2;
    std::vector<int> widths = {16, 32, 64};
    int kernel = 3;
    bool skips = true;

    int stages() const noexcept { return static_cast<int>(widths.size()); }
    void validate() const;
    std::string canonical() const;
    uint64_t digest() const;
};

/// Name plus shape of one parameter tensor, in the model's fixed order.
struct ParamSpec {
    std::string name;
    int n, c, h, w;
};

std::vector<ParamSpec> param_specs(const ModelConfig& config);

template <typename T>
struct NamedTensorT {
    std::string name;
    Tensor4T<T> tensor;
};

using NamedTensor = NamedTensorT<float>;

template <typename T>
struct UNetT {
    ModelConfig config;
    std::vector<NamedTensorT<T>> params;

    /// Kaiming-uniform conv weights (fan-in), zero biases, zero final head.
    static UNetT init(const ModelConfig& cfg, uint64_t seed) {
        cfg.validate();
        UNetT net;
        net.config = cfg;
        Rng rng(derive_stream(seed, stream::kInit));
        for (const ParamSpec& spec : param_specs(cfg)) {
            Tensor4T<T> t(spec.n, spec.c, spec.h, spec.w);
            const bool is_weight = spec.name.ends_with(".weight");
            if (is_weight && spec.name != "head.weight") {
                const double fan_in = static_cast<double>(spec.c) * spec.h * spec.w;
                const double bound = std::sqrt(6.0 / fan_in);
                for (T& v : t.data) v = static_cast<T>(rng.uniform(-bound, bound));
            }
            net.params.push_back({spec.name, std::move(t)});
        }
        return net;
    }
};

using UNet = UNetT<float>;

template <typename T>
struct UNetForward {
    typename Tape<T>::Var field;     // (1, out_channels, H, W)
    typename Tape<T>::Var prefinal;  // features entering the 1x1 head
    std::vector<typename Tape<T>::Var> param_vars;  // aligned with params order
};

/// Records the full forward pass on the tape. `train` marks parameters as
/// differentiable; the image itself never is. Spatial size is preserved for
/// any input with H, W >= 2^stages (odd sizes are reflect-padded before each
/// pool and cropped back after the matching upsample).
template <typename T>
UNetForward<T> unet_forward(Tape<T>& tape, const UNetT<T>& net, Tensor4T<T> image, bool train) {
    using Var = typename Tape<T>::Var;
    const ModelConfig& cfg = net.config;
    cfg.validate();
    if (image.n != 1 || image.c != cfg.in_channels) {
        throw ShapeError("forward expects a (1, in_channels, H, W) image tensor");
    }
    const int min_dim = 1 << cfg.stages();
    if (image.h < min_dim || image.w < min_dim) {
        throw ShapeError("image " + std::to_string(image.w) + "x" + std::to_string(image.h) +
                         " too small for " + std::to_string(cfg.stages()) +
                         " downsampling stages (need >= " + std::to_string(min_dim) + ")");
    }

    const std::vector<ParamSpec> specs = param_specs(cfg);
    if (specs.size() != net.params.size()) throw ShapeError("parameter list does not match config");
    UNetForward<T> out;
    out.param_vars.reserve(net.params.size());
    for (size_t i = 0; i < specs.size(); ++i) {
        const Tensor4T<T>& t = net.params[i].tensor;
        if (net.params[i].name != specs[i].name || t.n != specs[i].n || t.c != specs[i].c ||
            t.h != specs[i].h || t.w != specs[i].w) {
            throw ShapeError("parameter '" + net.params[i].name + "' does not match config");
        }
        out.param_vars.push_back(tape.leaf(t, train));
    }

    size_t pi = 0;  // cursor over (weight, bias) pairs in spec order
    auto next_pair = [&]() {
        Var w = out.param_vars[pi];
        Var b = out.param_vars[pi + 1];
        pi += 2;
        return std::pair<Var, Var>(w, b);
    };

    const int S = cfg.stages();
    Var cur = tape.leaf(std::move(image), false);
    std::vector<Var> skips(S);
    std::vector<std::pair<int, int>> dims(S);  // pre-pool (h, w) per stage
    for (int s = 0; s < S; ++s) {
        auto [w, b] = next_pair();
        cur = relu(tape, conv2d(tape, cur, w, b));
        skips[s] = cur;
        dims[s] = {tape.value(cur).h, tape.value(cur).w};
        cur = maxpool2(tape, reflect_pad_even(tape, cur));
    }
    {
        auto [w, b] = next_pair();
        cur = relu(tape, conv2d(tape, cur, w, b));
    }
    for (int s = S - 1; s >= 0; --s) {
        cur = crop_spatial(tape, upsample2_bilinear(tape, cur), dims[s].first, dims[s].second);
        if (cfg.skips) cur = concat_channels(tape, cur, skips[s]);
        auto [w, b] = next_pair();
        cur = relu(tape, conv2d(tape, cur, w, b));
    }
    out.prefinal = cur;
    auto [hw, hb] = next_pair();
    out.field = conv2d(tape, cur, hw, hb);
    return out;
}

template <typename T>
Tensor4T<T> image_to_tensor(const ImageGrid& image) {
    Tensor4T<T> t(1, 1, image.height, image.width);
    for (size_t i = 0; i < image.pixels.size(); ++i) t.data[i] = static_cast<T>(image.pixels[i]);
    return t;
}

/// Inference: image in, dense offset field out.
VectorField infer_field(const UNet& net, const ImageGrid& image);

}  // namespace nae
