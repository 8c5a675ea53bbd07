#include "nae/nn/checkpoint.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "wire.hpp"

namespace nae {
namespace {

constexpr char kMagic[4] = {'N', 'A', 'E', 'W'};
constexpr uint32_t kVersion = 1;
constexpr uint32_t kMaxNameLen = 256;
constexpr uint64_t kMaxParamElems = 1ull << 28;

/// Rebuilds the architecture that produced a parameter list. The fixed
/// naming scheme (encN/mid/decN/head) pins every config field; anything
/// that does not fit the scheme is a parse error.
ModelConfig config_from_params(const std::vector<NamedTensor>& params,
                               const std::string& source) {
    auto fail = [&](const std::string& msg) -> ModelConfig {
        throw ParseError(source, 0, "checkpoint does not describe a known model: " + msg);
    };

    int stages = 0;
    while (true) {
        const std::string name = "enc" + std::to_string(stages) + ".weight";
        bool found = false;
        for (const auto& p : params) {
            if (p.name == name) {
                found = true;
                break;
            }
        }
        if (!found) break;
        ++stages;
    }
    if (stages == 0) return fail("no encoder stages");

    auto tensor_of = [&](const std::string& name) -> const Tensor4* {
        for (const auto& p : params) {
            if (p.name == name) return &p.tensor;
        }
        return nullptr;
    };

    ModelConfig cfg;
    cfg.widths.clear();
    const Tensor4* enc0 = tensor_of("enc0.weight");
    cfg.in_channels = enc0->c;
    cfg.kernel = enc0->h;
    for (int s = 0; s < stages; ++s) {
        const Tensor4* t = tensor_of("enc" + std::to_string(s) + ".weight");
        cfg.widths.push_back(t->n);
    }
    const Tensor4* head = tensor_of("head.weight");
    if (!head) return fail("missing head");
    cfg.out_channels = head->n;

    const Tensor4* top_dec = tensor_of("dec" + std::to_string(stages - 1) + ".weight");
    if (!top_dec) return fail("missing decoder");
    const int carried = cfg.widths[stages - 1];
    if (top_dec->c == 2 * carried) {
        cfg.skips = true;
    } else if (top_dec->c == carried) {
        cfg.skips = false;
    } else {
        return fail("decoder input channels fit neither skip mode");
    }
    return cfg;
}

}  // namespace

std::vector<unsigned char> write_checkpoint(const UNet& net) {
    net.config.validate();
    std::vector<unsigned char> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    wire::put_u32(out, kVersion);
    wire::put_u64(out, net.config.digest());
    wire::put_u32(out, static_cast<uint32_t>(net.params.size()));
    for (const NamedTensor& p : net.params) {
        wire::put_u32(out, static_cast<uint32_t>(p.name.size()));
        out.insert(out.end(), p.name.begin(), p.name.end());
        wire::put_u32(out, 4);
        wire::put_u32(out, static_cast<uint32_t>(p.tensor.n));
        wire::put_u32(out, static_cast<uint32_t>(p.tensor.c));
        wire::put_u32(out, static_cast<uint32_t>(p.tensor.h));
        wire::put_u32(out, static_cast<uint32_t>(p.tensor.w));
        for (const float v : p.tensor.data) wire::put_f32(out, v);
    }
    return out;
}

UNet read_checkpoint(const std::vector<unsigned char>& bytes, const std::string& source) {
    wire::Reader r{bytes, source};
    r.need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw ParseError(source, 0, "bad magic, expected NAEW");
    }
    r.pos = 4;
    const uint32_t version = r.u32();
    if (version != kVersion) {
        throw ParseError(source, 0, "unsupported version " + std::to_string(version));
    }
    const uint64_t digest = r.u64();
    const uint32_t count = r.u32();
    if (count == 0 || count > 4096) {
        throw ParseError(source, 0, "implausible parameter count");
    }

    UNet net;
    net.params.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t name_len = r.u32();
        if (name_len == 0 || name_len > kMaxNameLen) {
            throw ParseError(source, 0, "implausible parameter name length");
        }
        const std::string name = r.str(name_len);
        const uint32_t rank = r.u32();
        if (rank != 4) throw ParseError(source, 0, "parameter '" + name + "' is not rank 4");
        uint32_t dims[4];
        uint64_t elems = 1;
        for (auto& d : dims) {
            d = r.u32();
            if (d == 0) throw ParseError(source, 0, "zero dimension in '" + name + "'");
            elems *= d;
            if (elems > kMaxParamElems) {
                throw ParseError(source, 0, "implausible parameter size in '" + name + "'");
            }
        }
        Tensor4 t(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                  static_cast<int>(dims[2]), static_cast<int>(dims[3]));
        r.need(elems * 4);
        for (auto& v : t.data) {
            v = r.f32();
            if (!std::isfinite(v)) {
                throw ParseError(source, 0, "non-finite value in parameter '" + name + "'");
            }
        }
        net.params.push_back({name, std::move(t)});
    }
    if (r.remaining() != 0) throw ParseError(source, 0, "trailing bytes after last parameter");

    net.config = config_from_params(net.params, source);
    if (net.config.digest() != digest) {
        throw ParseError(source, 0, "config digest mismatch");
    }
    const std::vector<ParamSpec> specs = param_specs(net.config);
    if (specs.size() != net.params.size()) {
        throw ParseError(source, 0, "wrong parameter count for architecture");
    }
    for (size_t i = 0; i < specs.size(); ++i) {
        const NamedTensor& p = net.params[i];
        if (p.name != specs[i].name || p.tensor.n != specs[i].n || p.tensor.c != specs[i].c ||
            p.tensor.h != specs[i].h || p.tensor.w != specs[i].w) {
            throw ParseError(source, 0, "parameter '" + p.name + "' out of order or misshaped");
        }
    }
    return net;
}

void save_checkpoint_file(const UNet& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    const std::vector<unsigned char> bytes = write_checkpoint(net);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(path, "write failed");
}

UNet load_checkpoint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(path, "read failed");
    return read_checkpoint(bytes, path);
}

}  // namespace nae
