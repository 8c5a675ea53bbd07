#include <doctest.h>

#include <cstring>
#include <vector>

#include "nae/errors.hpp"
#include "nae/image.hpp"
#include "nae/nn/checkpoint.hpp"
#include "nae/nn/unet.hpp"
#include "nae/rng.hpp"

#include "support.hpp"

using nae::ModelConfig;
using nae::UNet;

namespace {

UNet live_net(ModelConfig cfg, uint64_t seed) {
    UNet net = UNet::init(cfg, seed);
    nae::Rng rng(seed + 1);
    for (auto& p : net.params) {
        if (p.name.starts_with("head.")) {
            for (float& v : p.tensor.data) v = static_cast<float>(rng.uniform(-0.2, 0.2));
        }
    }
    return net;
}

nae::ImageGrid noise_image(int w, int h, uint64_t seed) {
    nae::ImageGrid img(w, h);
    nae::Rng rng(seed);
    for (float& v : img.pixels) v = static_cast<float>(rng.u01());
    return img;
}

}  // namespace

TEST_SUITE_BEGIN("checkpoint");

TEST_CASE("round trip reproduces the forward pass bit for bit") {
    ModelConfig cfg;
    cfg.widths = {4, 8};
    const UNet net = live_net(cfg, 42);
    const std::vector<unsigned char> bytes = nae::write_checkpoint(net);
    const UNet back = nae::read_checkpoint(bytes, "mem");

    REQUIRE(back.params.size() == net.params.size());
    for (size_t i = 0; i < net.params.size(); ++i) {
        CHECK(back.params[i].name == net.params[i].name);
        CHECK(back.params[i].tensor.data == net.params[i].tensor.data);
    }

    const nae::ImageGrid img = noise_image(24, 16, 7);
    const nae::VectorField a = nae::infer_field(net, img);
    const nae::VectorField b = nae::infer_field(back, img);
    CHECK(a.dx == b.dx);
    CHECK(a.dy == b.dy);
}

TEST_CASE("architecture is reconstructed from names and shapes alone") {
    ModelConfig cfg;
    cfg.widths = {3, 5, 7};
    cfg.kernel = 5;
    cfg.skips = false;
    const UNet net = live_net(cfg, 9);
    const UNet back = nae::read_checkpoint(nae::write_checkpoint(net), "mem");
    CHECK(back.config.widths == cfg.widths);
    CHECK(back.config.kernel == 5);
    CHECK(back.config.skips == false);
    CHECK(back.config.in_channels == 1);
    CHECK(back.config.out_channels == 2);
    CHECK(back.config.digest() == cfg.digest());
}

TEST_CASE("file round trip") {
    testutil::TempDir dir("ckpt");
    const UNet net = live_net(ModelConfig{.widths = {4, 4}}, 12);
    const std::string path = (dir.path() / "weights.naew").string();
    nae::save_checkpoint_file(net, path);
    const UNet back = nae::load_checkpoint_file(path);
    for (size_t i = 0; i < net.params.size(); ++i) {
        CHECK(back.params[i].tensor.data == net.params[i].tensor.data);
    }
}

TEST_CASE("corrupted payloads are rejected") {
    const UNet net = live_net(ModelConfig{.widths = {4, 4}}, 30);
    const std::vector<unsigned char> good = nae::write_checkpoint(net);

    SUBCASE("bad magic") {
        std::vector<unsigned char> bytes = good;
        bytes[0] = 'X';
        CHECK_THROWS_AS(nae::read_checkpoint(bytes, "t"), nae::ParseError);
    }
    SUBCASE("unknown version") {
        std::vector<unsigned char> bytes = good;
        bytes[4] = 0x7f;
        CHECK_THROWS_AS(nae::read_checkpoint(bytes, "t"), nae::ParseError);
    }
    SUBCASE("digest mismatch") {
        std::vector<unsigned char> bytes = good;
        bytes[8] ^= 0xff;
        CHECK_THROWS_AS(nae::read_checkpoint(bytes, "t"), nae::ParseError);
    }
    SUBCASE("truncated") {
        std::vector<unsigned char> bytes(good.begin(), good.end() - 5);
        CHECK_THROWS_AS(nae::read_checkpoint(bytes, "t"), nae::ParseError);
    }
    SUBCASE("trailing garbage") {
        std::vector<unsigned char> bytes = good;
        bytes.push_back(0);
        CHECK_THROWS_AS(nae::read_checkpoint(bytes, "t"), nae::ParseError);
    }
    SUBCASE("empty") {
        CHECK_THROWS_AS(nae::read_checkpoint({}, "t"), nae::ParseError);
    }
}

TEST_CASE("non-finite weights are rejected on read") {
    UNet net = live_net(ModelConfig{.widths = {4, 4}}, 31);
    net.params[0].tensor.data[0] = std::numeric_limits<float>::quiet_NaN();
    const std::vector<unsigned char> bytes = nae::write_checkpoint(net);
    CHECK_THROWS_AS(nae::read_checkpoint(bytes, "t"), nae::ParseError);
}

TEST_SUITE_END();
