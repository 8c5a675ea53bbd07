#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "nae/errors.hpp"
#include "nae/nn/ops.hpp"
#include "nae/nn/tape.hpp"
#include "nae/rng.hpp"
#include "nae/vector_field.hpp"

using nae::Tape;
using nae::Tensor4T;
using nae::Vec2;
using Var = Tape<double>::Var;
using T4 = Tensor4T<double>;

namespace {

T4 filled(int n, int c, int h, int w, std::function<double(int, int, int, int)> f) {
    T4 t(n, c, h, w);
    for (int in = 0; in < n; ++in) {
        for (int ic = 0; ic < c; ++ic) {
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) t.at(in, ic, y, x) = f(in, ic, y, x);
            }
        }
    }
    return t;
}

T4 randomized(int n, int c, int h, int w, uint64_t seed) {
    nae::Rng rng(seed);
    return filled(n, c, h, w, [&](int, int, int, int) { return rng.uniform(-1.0, 1.0); });
}

/// Central finite differences on a scalar graph: perturbs every element of
/// every leaf and compares against the analytic gradient from backward().
void check_gradients(std::vector<T4> leaves,
                     const std::function<Var(Tape<double>&, std::vector<Var>&)>& build,
                     double h = 1e-6, double tol = 1e-7) {
    Tape<double> tape;
    std::vector<Var> vars;
    vars.reserve(leaves.size());
    for (const T4& leaf : leaves) vars.push_back(tape.leaf(leaf, true));
    const Var loss = build(tape, vars);
    tape.backward(loss);

    auto eval = [&](const std::vector<T4>& inputs) {
        Tape<double> t;
        std::vector<Var> vs;
        for (const T4& leaf : inputs) vs.push_back(t.leaf(leaf, false));
        return t.value(build(t, vs)).data[0];
    };

    for (size_t li = 0; li < leaves.size(); ++li) {
        const T4& analytic = tape.grad(vars[li]);
        REQUIRE(!analytic.empty());
        for (size_t j = 0; j < leaves[li].size(); ++j) {
            std::vector<T4> bumped = leaves;
            bumped[li].data[j] += h;
            const double up = eval(bumped);
            bumped[li].data[j] -= 2 * h;
            const double down = eval(bumped);
            const double numeric = (up - down) / (2 * h);
            REQUIRE(analytic.data[j] ==
                    doctest::Approx(numeric).epsilon(tol).scale(std::abs(numeric) + 1.0));
        }
    }
}

}  // namespace

TEST_SUITE_BEGIN("ops");

TEST_CASE("conv of ones counts overlap: corners 4, edges 6, center 9") {
    Tape<double> tape;
    const Var x = tape.leaf(filled(1, 1, 3, 3, [](int, int, int, int) { return 1.0; }), false);
    const Var k = tape.leaf(filled(1, 1, 3, 3, [](int, int, int, int) { return 1.0; }), false);
    const Var b = tape.leaf(T4(1, 1, 1, 1), false);
    const T4& out = tape.value(nae::conv2d(tape, x, k, b));
    CHECK(out.at(0, 0, 0, 0) == 4.0);
    CHECK(out.at(0, 0, 0, 1) == 6.0);
    CHECK(out.at(0, 0, 1, 0) == 6.0);
    CHECK(out.at(0, 0, 1, 1) == 9.0);
    CHECK(out.at(0, 0, 2, 2) == 4.0);
}

TEST_CASE("identity kernel and bias-only kernel") {
    const T4 x = randomized(1, 1, 4, 5, 21);
    Tape<double> tape;
    const Var xv = tape.leaf(x, false);
    T4 ident(1, 1, 1, 1);
    ident.data[0] = 1.0;
    const Var kv = tape.leaf(ident, false);
    const Var bv = tape.leaf(T4(1, 1, 1, 1), false);
    const T4& same = tape.value(nae::conv2d(tape, xv, kv, bv));
    for (size_t i = 0; i < x.size(); ++i) CHECK(same.data[i] == x.data[i]);

    T4 zerok(2, 1, 3, 3);
    T4 bias(1, 2, 1, 1);
    bias.at(0, 0, 0, 0) = 0.5;
    bias.at(0, 1, 0, 0) = -2.0;
    const Var out = nae::conv2d(tape, xv, tape.leaf(zerok, false), tape.leaf(bias, false));
    for (int ic = 0; ic < 2; ++ic) {
        for (int y = 0; y < 4; ++y) {
            for (int x2 = 0; x2 < 5; ++x2) {
                CHECK(tape.value(out).at(0, ic, y, x2) == bias.at(0, ic, 0, 0));
            }
        }
    }
}

TEST_CASE("conv rejects mismatched shapes") {
    Tape<double> tape;
    const Var x = tape.leaf(T4(1, 2, 4, 4), false);
    const Var k_badc = tape.leaf(T4(1, 3, 3, 3), false);
    const Var k_even = tape.leaf(T4(1, 2, 2, 2), false);
    const Var b = tape.leaf(T4(1, 1, 1, 1), false);
    CHECK_THROWS_AS(nae::conv2d(tape, x, k_badc, b), nae::ShapeError);
    CHECK_THROWS_AS(nae::conv2d(tape, x, k_even, b), nae::ShapeError);
}

TEST_CASE("sum-of-conv kernel gradient equals summed input windows") {
    const T4 x = randomized(1, 1, 5, 5, 22);
    Tape<double> tape;
    const Var xv = tape.leaf(x, false);
    const Var kv = tape.leaf(randomized(1, 1, 3, 3, 23), true);
    const Var bv = tape.leaf(T4(1, 1, 1, 1), true);
    const Var loss = nae::reduce_sum(tape, nae::conv2d(tape, xv, kv, bv));
    tape.backward(loss);

    // d(sum of outputs)/dk[ky][kx] = sum over output positions of the input
    // tap at that kernel offset; the center tap sees the whole image.
    double total = 0.0;
    for (const double v : x.data) total += v;
    CHECK(tape.grad(kv).at(0, 0, 1, 1) == doctest::Approx(total).epsilon(1e-12));

    double top_left = 0.0;  // taps x[y-1][x-1], valid for y,x >= 1
    for (int y = 0; y < 4; ++y) {
        for (int x2 = 0; x2 < 4; ++x2) top_left += x.at(0, 0, y, x2);
    }
    CHECK(tape.grad(kv).at(0, 0, 0, 0) == doctest::Approx(top_left).epsilon(1e-12));
    CHECK(tape.grad(bv).data[0] == 25.0);  // one per output position
}

TEST_CASE("conv gradients match finite differences") {
    check_gradients(
        {randomized(1, 2, 4, 4, 24), randomized(3, 2, 3, 3, 25), randomized(1, 3, 1, 1, 26)},
        [](Tape<double>& t, std::vector<Var>& v) {
            return nae::reduce_sum(t, nae::conv2d(t, v[0], v[1], v[2]));
        });
}

TEST_CASE("relu forward and gradient mask") {
    Tape<double> tape;
    T4 x(1, 1, 1, 4);
    x.data = {-2.0, 0.0, 0.5, 3.0};
    const Var xv = tape.leaf(x, true);
    const Var out = nae::relu(tape, xv);
    CHECK(tape.value(out).data == std::vector<double>{0.0, 0.0, 0.5, 3.0});
    tape.backward(nae::reduce_sum(tape, out));
    CHECK(tape.grad(xv).data == std::vector<double>{0.0, 0.0, 1.0, 1.0});
}

TEST_CASE("maxpool picks window maxima and routes gradient there") {
    Tape<double> tape;
    T4 x(1, 1, 2, 2);
    x.data = {1.0, 2.0, 3.0, 4.0};
    const Var xv = tape.leaf(x, true);
    const Var out = nae::maxpool2(tape, xv);
    REQUIRE(tape.value(out).h == 1);
    REQUIRE(tape.value(out).w == 1);
    CHECK(tape.value(out).data[0] == 4.0);
    tape.backward(nae::reduce_sum(tape, out));
    CHECK(tape.grad(xv).data == std::vector<double>{0.0, 0.0, 0.0, 1.0});
}

TEST_CASE("maxpool ties go to the first element in row-major order") {
    Tape<double> tape;
    T4 x(1, 1, 2, 4);
    x.data.assign(x.size(), 7.0);  // every 2x2 window is all-equal
    const Var xv = tape.leaf(x, true);
    const Var out = nae::maxpool2(tape, xv);
    tape.backward(nae::reduce_sum(tape, out));
    CHECK(tape.grad(xv).data == std::vector<double>{1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("maxpool requires even spatial dims") {
    Tape<double> tape;
    const Var x = tape.leaf(T4(1, 1, 3, 4), false);
    CHECK_THROWS_AS(nae::maxpool2(tape, x), nae::ShapeError);
}

TEST_CASE("maxpool gradients match finite differences") {
    // Distinct values, so the argmax is stable under the probe step.
    T4 x(1, 2, 4, 4);
    for (size_t i = 0; i < x.size(); ++i) x.data[i] = static_cast<double>((i * 7) % 32) + 0.01 * i;
    check_gradients({x}, [](Tape<double>& t, std::vector<Var>& v) {
        return nae::reduce_sum(t, nae::maxpool2(t, v[0]));
    });
}

TEST_CASE("upsample doubles size with half-pixel alignment") {
    Tape<double> tape;
    T4 x(1, 1, 1, 2);
    x.data = {0.0, 1.0};
    const Var out = nae::upsample2_bilinear(tape, tape.leaf(x, false));
    REQUIRE(tape.value(out).w == 4);
    REQUIRE(tape.value(out).h == 2);
    const auto& o = tape.value(out);
    CHECK(o.at(0, 0, 0, 0) == 0.0);
    CHECK(o.at(0, 0, 0, 1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(o.at(0, 0, 0, 2) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(o.at(0, 0, 0, 3) == 1.0);

    T4 flat(1, 3, 3, 5);
    flat.data.assign(flat.size(), 0.625);
    const Var up = nae::upsample2_bilinear(tape, tape.leaf(flat, false));
    for (const double v : tape.value(up).data) CHECK(v == 0.625);
}

TEST_CASE("upsample gradients match finite differences") {
    check_gradients({randomized(1, 2, 3, 4, 27)}, [](Tape<double>& t, std::vector<Var>& v) {
        return nae::reduce_sum(t, nae::upsample2_bilinear(t, v[0]));
    });
}

TEST_CASE("concat stacks channels and splits gradient") {
    Tape<double> tape;
    const T4 a = randomized(1, 2, 2, 2, 28);
    const T4 b = randomized(1, 1, 2, 2, 29);
    const Var av = tape.leaf(a, true);
    const Var bv = tape.leaf(b, true);
    const Var out = nae::concat_channels(tape, av, bv);
    REQUIRE(tape.value(out).c == 3);
    CHECK(tape.value(out).at(0, 0, 1, 1) == a.at(0, 0, 1, 1));
    CHECK(tape.value(out).at(0, 2, 0, 1) == b.at(0, 0, 0, 1));
    tape.backward(nae::reduce_sum(tape, out));
    for (const double g : tape.grad(av).data) CHECK(g == 1.0);
    for (const double g : tape.grad(bv).data) CHECK(g == 1.0);
}

TEST_CASE("reflect_pad_even mirrors the second-to-last line") {
    Tape<double> tape;
    const T4 x = randomized(1, 1, 3, 4, 30);
    const Var out = nae::reflect_pad_even(tape, tape.leaf(x, false));
    const auto& o = tape.value(out);
    REQUIRE(o.h == 4);
    REQUIRE(o.w == 4);
    for (int x2 = 0; x2 < 4; ++x2) CHECK(o.at(0, 0, 3, x2) == x.at(0, 0, 1, x2));

    // Already even: same node comes back untouched.
    const Var even = tape.leaf(T4(1, 1, 2, 2), false);
    CHECK(nae::reflect_pad_even(tape, even).idx == even.idx);
}

TEST_CASE("reflect_pad gradients match finite differences") {
    check_gradients({randomized(1, 1, 3, 3, 31)}, [](Tape<double>& t, std::vector<Var>& v) {
        return nae::reduce_sum(t, nae::maxpool2(t, nae::reflect_pad_even(t, v[0])));
    });
}

TEST_CASE("crop_spatial keeps the top-left window") {
    Tape<double> tape;
    const T4 x = randomized(1, 2, 4, 5, 32);
    const Var out = nae::crop_spatial(tape, tape.leaf(x, false), 2, 3);
    const auto& o = tape.value(out);
    REQUIRE(o.h == 2);
    REQUIRE(o.w == 3);
    CHECK(o.at(0, 1, 1, 2) == x.at(0, 1, 1, 2));
}

TEST_CASE("bilinear_gather agrees with the inference sampler") {
    const T4 f = randomized(1, 2, 6, 7, 33);
    nae::VectorField field(7, 6);
    for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 7; ++x) {
            field.at_dx(y, x) = static_cast<float>(f.at(0, 0, y, x));
            field.at_dy(y, x) = static_cast<float>(f.at(0, 1, y, x));
        }
    }
    const std::vector<Vec2> coords = {{0.0, 0.0}, {3.5, 2.25}, {-2.0, 9.0}, {6.0, 5.0}};
    Tape<double> tape;
    const Var out = nae::bilinear_gather(tape, tape.leaf(f, false), coords);
    REQUIRE(tape.value(out).w == 4);
    for (size_t j = 0; j < coords.size(); ++j) {
        const Vec2 want = nae::bilinear_sample(field, coords[j].x, coords[j].y);
        // The sampler works in f32, the tape in f64 here; agreement is up to
        // the f32 rounding of the field values.
        CHECK(tape.value(out).at(0, 0, 0, static_cast<int>(j)) ==
              doctest::Approx(want.x).epsilon(1e-6));
        CHECK(tape.value(out).at(0, 1, 0, static_cast<int>(j)) ==
              doctest::Approx(want.y).epsilon(1e-6));
    }
}

TEST_CASE("bilinear_gather rejects bad inputs") {
    Tape<double> tape;
    const Var f = tape.leaf(T4(1, 2, 4, 4), false);
    CHECK_THROWS_AS(nae::bilinear_gather(tape, f, std::vector<Vec2>{}), nae::ShapeError);
    const std::vector<Vec2> nan_coord = {{std::nan(""), 1.0}};
    CHECK_THROWS_AS(nae::bilinear_gather(tape, f, nan_coord), nae::Error);
}

TEST_CASE("gather gradients match finite differences") {
    const std::vector<Vec2> coords = {{0.5, 0.5}, {2.75, 1.0}, {3.0, 2.6}};
    check_gradients({randomized(1, 2, 4, 4, 34)}, [coords](Tape<double>& t, std::vector<Var>& v) {
        return nae::reduce_sum(t, nae::bilinear_gather(t, v[0], coords));
    });
}

TEST_CASE("offset_mse on the hand example gives 52") {
    Tape<double> tape;
    T4 pred(1, 2, 1, 1);
    pred.at(0, 0, 0, 0) = 1.0;
    pred.at(0, 1, 0, 0) = 2.0;
    T4 target(1, 2, 1, 1);
    target.at(0, 0, 0, 0) = -3.0;
    target.at(0, 1, 0, 0) = -4.0;
    const Var loss = nae::offset_mse(tape, tape.leaf(pred, false), target);
    CHECK(tape.value(loss).data[0] == 52.0);
}

TEST_CASE("offset_mse averages over points, not channels") {
    Tape<double> tape;
    T4 pred(1, 2, 1, 2);
    pred.data = {1.0, 1.0, 0.0, 0.0};  // ch0: [1, 1], ch1: [0, 0]
    const T4 target(1, 2, 1, 2);
    const Var loss = nae::offset_mse(tape, tape.leaf(pred, false), target);
    CHECK(tape.value(loss).data[0] == 1.0);  // (1 + 1 + 0 + 0) / 2 points
}

TEST_CASE("offset_mse gradients match finite differences") {
    const T4 target = randomized(1, 2, 1, 5, 35);
    check_gradients({randomized(1, 2, 1, 5, 36)}, [target](Tape<double>& t, std::vector<Var>& v) {
        return nae::offset_mse(t, v[0], target);
    });
}

TEST_CASE("tape misuse raises usage errors") {
    Tape<double> tape;
    CHECK_THROWS_AS(tape.backward(Var{}), nae::UsageError);
    const Var vec = tape.leaf(T4(1, 1, 1, 3), true);
    CHECK_THROWS_AS(tape.backward(vec), nae::UsageError);
    const Var detached = tape.leaf(T4(1, 1, 1, 1), false);
    CHECK_THROWS_AS(tape.backward(detached), nae::UsageError);
}

TEST_CASE("inference graphs record no gradients") {
    Tape<double> tape;
    const Var x = tape.leaf(randomized(1, 1, 4, 4, 37), false);
    const Var k = tape.leaf(randomized(1, 1, 3, 3, 38), false);
    const Var b = tape.leaf(T4(1, 1, 1, 1), false);
    const Var out = nae::conv2d(tape, x, k, b);
    CHECK_FALSE(tape.needs_grad(out));
}

TEST_CASE("backward seed scales all gradients") {
    T4 x(1, 1, 1, 1);
    x.data[0] = 3.0;
    Tape<double> tape;
    const Var xv = tape.leaf(x, true);
    const Var loss = nae::reduce_sum(tape, xv);
    tape.backward(loss, 0.25);
    CHECK(tape.grad(xv).data[0] == 0.25);
}

TEST_SUITE_END();
