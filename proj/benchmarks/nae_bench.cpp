#include <benchmark/benchmark.h>

#include <vector>

#include "nae/geometry.hpp"
#include "nae/nn/ops.hpp"
#include "nae/nn/tape.hpp"
#include "nae/nn/unet.hpp"
#include "nae/rng.hpp"
#include "nae/sampling.hpp"
#include "nae/vector_field.hpp"

namespace {

std::vector<nae::Vec2> random_points(int n, int extent, uint64_t seed) {
    nae::Rng rng(seed);
    std::vector<nae::Vec2> pts(static_cast<size_t>(n));
    for (auto& p : pts) {
        p.x = rng.uniform(0.0, static_cast<double>(extent));
        p.y = rng.uniform(0.0, static_cast<double>(extent));
    }
    return pts;
}

void BM_Conv2d(benchmark::State& state) {
    const int hw = static_cast<int>(state.range(0));
    const int c = 8;
    nae::Rng rng(1);
    nae::Tensor4T<float> x(1, c, hw, hw), k(c, c, 3, 3), b(1, c, 1, 1);
    for (auto& v : x.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (auto& v : k.data) v = static_cast<float>(rng.uniform(-0.3, 0.3));
    for (auto _ : state) {
        nae::Tape<float> tape;
        auto out = nae::conv2d(tape, tape.leaf(x, false), tape.leaf(k, false),
                               tape.leaf(b, false));
        benchmark::DoNotOptimize(tape.value(out).data.data());
    }
    state.SetItemsProcessed(state.iterations() * int64_t{hw} * hw * c * c * 9);
}

void BM_UNetForward(benchmark::State& state) {
    nae::ModelConfig cfg;
    cfg.widths = {8, 16, 32};
    const nae::UNet net = nae::UNet::init(cfg, 3);
    nae::ImageGrid img(64, 64);
    nae::Rng rng(2);
    for (auto& p : img.pixels) p = static_cast<float>(rng.u01());
    for (auto _ : state) {
        const nae::VectorField f = nae::infer_field(net, img);
        benchmark::DoNotOptimize(f.dx.data());
    }
}

void BM_RowCapPerspective(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int height = 512;
    const auto pts = random_points(n, height, 7);
    std::vector<double> d(pts.size());
    nae::Rng rng(8);
    for (auto& v : d) v = rng.uniform(0.5, 30.0);
    for (auto _ : state) {
        auto cap = nae::row_cap_perspective(pts, d, height);
        benchmark::DoNotOptimize(cap.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_NearestDistances(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto pts = random_points(n, 2048, 11);
    for (auto _ : state) {
        auto d = nae::nearest_distances(pts);
        benchmark::DoNotOptimize(d->data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_BilinearSample(benchmark::State& state) {
    nae::VectorField field(256, 256);
    nae::Rng rng(13);
    for (auto& v : field.dx) v = static_cast<float>(rng.uniform(-2.0, 2.0));
    for (auto& v : field.dy) v = static_cast<float>(rng.uniform(-2.0, 2.0));
    const auto coords = random_points(10000, 255, 17);
    for (auto _ : state) {
        double acc = 0.0;
        for (const auto& p : coords) {
            const nae::Vec2 v = nae::bilinear_sample(field, p.x, p.y);
            acc += v.x + v.y;
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(coords.size()));
}

}  // namespace

BENCHMARK(BM_Conv2d)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_UNetForward);
BENCHMARK(BM_RowCapPerspective)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_NearestDistances)->Arg(1000)->Arg(10000);
BENCHMARK(BM_BilinearSample);

BENCHMARK_MAIN();
