#include "nae/nn/unet.hpp"

#include <sstream>

namespace nae {

void ModelConfig::validate() const {
    if (in_channels < 1 || out_channels < 1) throw ConfigError("channel counts must be positive");
    if (widths.empty()) throw ConfigError("model needs at least one encoder stage");
    for (int w : widths) {
        if (w < 1) throw ConfigError("stage widths must be positive");
    }
    if (kernel < 1 || kernel % 2 == 0) throw ConfigError("kernel size must be odd and positive");
}

std::string ModelConfig::canonical() const {
    std::ostringstream out;
    out << "in=" << in_channels << ";out=" << out_channels << ";k=" << kernel << ";w=";
    for (size_t i = 0; i < widths.size(); ++i) {
        if (i) out << ",";
        out << widths[i];
    }
    out << ";skip=" << (skips ? 1 : 0);
    return out.str();
}

uint64_t ModelConfig::digest() const {
    // FNV-1a over the canonical description; stable across platforms.
    uint64_t h = 14695981039346656037ull;
    for (const char c : canonical()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<ParamSpec> param_specs(const ModelConfig& config) {
    config.validate();
    const int S = config.stages();
    const auto& w = config.widths;
    std::vector<ParamSpec> specs;
    specs.reserve(static_cast<size_t>(4 * S + 4));

    auto conv = [&](const std::string& name, int out_c, int in_c, int k) {
        specs.push_back({name + ".weight", out_c, in_c, k, k});
        specs.push_back({name + ".bias", 1, out_c, 1, 1});
    };

    for (int s = 0; s < S; ++s) {
        conv("enc" + std::to_string(s), w[s], s == 0 ? config.in_channels : w[s - 1],
             config.kernel);
    }
    conv("mid", w[S - 1], w[S - 1], config.kernel);
    for (int s = S - 1; s >= 0; --s) {
        const int carried = s == S - 1 ? w[S - 1] : w[s];
        const int in_c = carried + (config.skips ? w[s] : 0);
        conv("dec" + std::to_string(s), s > 0 ? w[s - 1] : w[0], in_c, config.kernel);
    }
    conv("head", config.out_channels, w[0], 1);
    return specs;
}

VectorField infer_field(const UNet& net, const ImageGrid& image) {
    if (net.config.out_channels != 2) {
        throw ConfigError("field inference requires a 2-channel model head");
    }
    Tape<float> tape;
    const auto fwd = unet_forward(tape, net, image_to_tensor<float>(image), false);
    const Tensor4& out = tape.value(fwd.field);
    VectorField field(out.w, out.h);
    const float* dx = out.plane(0, 0);
    const float* dy = out.plane(0, 1);
    std::copy_n(dx, field.dx.size(), field.dx.begin());
    std::copy_n(dy, field.dy.size(), field.dy.begin());
    return field;
}

}  // namespace nae
