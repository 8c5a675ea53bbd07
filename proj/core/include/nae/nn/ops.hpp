#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nae/errors.hpp"
#include "nae/geometry.hpp"
#include "nae/nn/tape.hpp"

namespace nae {

/// 2D cross-correlation with zero padding (k-1)/2, so spatial size is
/// preserved. kernel is (Cout, Cin, k, k) with k odd; bias is (1, Cout, 1, 1).
template <typename T>
typename Tape<T>::Var conv2d(Tape<T>& tape, typename Tape<T>::Var xv,
                             typename Tape<T>::Var kv, typename Tape<T>::Var bv) {
    const Tensor4T<T>& x = tape.value(xv);
    const Tensor4T<T>& k = tape.value(kv);
    const Tensor4T<T>& b = tape.value(bv);
    if (k.h != k.w || k.h % 2 == 0) throw ShapeError("conv kernel must be square and odd");
    if (k.c != x.c) {
        throw ShapeError("conv channel mismatch: input has " + std::to_string(x.c) +
                         ", kernel expects " + std::to_string(k.c));
    }
    if (b.n != 1 || b.c != k.n || b.h != 1 || b.w != 1) {
        throw ShapeError("conv bias must be (1, Cout, 1, 1)");
    }

    const int B = x.n, Cin = x.c, H = x.h, W = x.w;
    const int Cout = k.n, K = k.h, P = (K - 1) / 2;

    Tensor4T<T> out(B, Cout, H, W);
    for (int ib = 0; ib < B; ++ib) {
        for (int oc = 0; oc < Cout; ++oc) {
            T* op = out.plane(ib, oc);
            const T bias = b.data[oc];
            for (int i = 0; i < H * W; ++i) op[i] = bias;
            for (int ic = 0; ic < Cin; ++ic) {
                const T* ip = x.plane(ib, ic);
                for (int ky = 0; ky < K; ++ky) {
                    const int y0 = std::max(0, P - ky), y1 = std::min(H, H + P - ky);
                    for (int kx = 0; kx < K; ++kx) {
                        const T wgt = k.at(oc, ic, ky, kx);
                        const int x0 = std::max(0, P - kx), x1 = std::min(W, W + P - kx);
                        for (int y = y0; y < y1; ++y) {
                            const T* src = ip + (y + ky - P) * W + (x0 + kx - P);
                            T* dst = op + y * W + x0;
                            const int len = x1 - x0;
                            for (int i = 0; i < len; ++i) dst[i] += wgt * src[i];
                        }
                    }
                }
            }
        }
    }

    const bool needs = tape.needs_grad(xv) || tape.needs_grad(kv) || tape.needs_grad(bv);
    return tape.record(std::move(out), needs,
                       [xv, kv, bv](Tape<T>& t, typename Tape<T>::Var self) {
        const Tensor4T<T>& g = t.grad(self);
        const Tensor4T<T>& x = t.value(xv);
        const Tensor4T<T>& k = t.value(kv);
        const int B = x.n, Cin = x.c, H = x.h, W = x.w;
        const int Cout = k.n, K = k.h, P = (K - 1) / 2;

        if (t.needs_grad(bv)) {
            Tensor4T<T>& gb = t.grad_buffer(bv);
            for (int ib = 0; ib < B; ++ib) {
                for (int oc = 0; oc < Cout; ++oc) {
                    const T* gp = g.plane(ib, oc);
                    T acc = T(0);
                    for (int i = 0; i < H * W; ++i) acc += gp[i];
                    gb.data[oc] += acc;
                }
            }
        }

        const bool need_x = t.needs_grad(xv);
        const bool need_k = t.needs_grad(kv);
        if (!need_x && !need_k) return;
        Tensor4T<T>* gx = need_x ? &t.grad_buffer(xv) : nullptr;
        Tensor4T<T>* gk = need_k ? &t.grad_buffer(kv) : nullptr;
        for (int ib = 0; ib < B; ++ib) {
            for (int oc = 0; oc < Cout; ++oc) {
                const T* gp = g.plane(ib, oc);
                for (int ic = 0; ic < Cin; ++ic) {
                    const T* ip = x.plane(ib, ic);
                    T* gip = gx ? gx->plane(ib, ic) : nullptr;
                    for (int ky = 0; ky < K; ++ky) {
                        const int y0 = std::max(0, P - ky), y1 = std::min(H, H + P - ky);
                        for (int kx = 0; kx < K; ++kx) {
                            const int x0 = std::max(0, P - kx), x1 = std::min(W, W + P - kx);
                            const int len = x1 - x0;
                            if (gk) {
                                T acc = T(0);
                                for (int y = y0; y < y1; ++y) {
                                    const T* src = ip + (y + ky - P) * W + (x0 + kx - P);
                                    const T* gr = gp + y * W + x0;
                                    for (int i = 0; i < len; ++i) acc += gr[i] * src[i];
                                }
                                gk->at(oc, ic, ky, kx) += acc;
                            }
                            if (gip) {
                                const T wgt = k.at(oc, ic, ky, kx);
                                for (int y = y0; y < y1; ++y) {
                                    T* dst = gip + (y + ky - P) * W + (x0 + kx - P);
                                    const T* gr = gp + y * W + x0;
                                    for (int i = 0; i < len; ++i) dst[i] += wgt * gr[i];
                                }
                            }
                        }
                    }
                }
            }
        }
    });
}

template <typename T>
typename Tape<T>::Var relu(Tape<T>& tape, typename Tape<T>::Var xv) {
    const Tensor4T<T>& x = tape.value(xv);
    Tensor4T<T> out(x.n, x.c, x.h, x.w);
    for (size_t i = 0; i < x.size(); ++i) out.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
    return tape.record(std::move(out), tape.needs_grad(xv),
                       [xv](Tape<T>& t, typename Tape<T>::Var self) {
        const Tensor4T<T>& g = t.grad(self);
        const Tensor4T<T>& x = t.value(xv);
        Tensor4T<T>& gx = t.grad_buffer(xv);
        for (size_t i = 0; i < x.size(); ++i) {
            if (x.data[i] > T(0)) gx.data[i] += g.data[i];
        }
    });
}

/// 2x2 max pooling with stride 2. Requires even spatial dims; gradient
/// routes to the argmax, ties to the first element in row-major order.
template <typename T>
typename Tape<T>::Var maxpool2(Tape<T>& tape, typename Tape<T>::Var xv) {
    const Tensor4T<T>& x = tape.value(xv);
    if (x.h % 2 != 0 || x.w % 2 != 0) {
        throw ShapeError("maxpool2 requires even spatial dims, got " + std::to_string(x.h) +
                         "x" + std::to_string(x.w));
    }
    const int B = x.n, C = x.c, H = x.h, W = x.w, OH = H / 2, OW = W / 2;
    Tensor4T<T> out(B, C, OH, OW);
    std::vector<int32_t> arg(static_cast<size_t>(B) * C * OH * OW);
    size_t a = 0;
    for (int ib = 0; ib < B; ++ib) {
        for (int ic = 0; ic < C; ++ic) {
            const T* ip = x.plane(ib, ic);
            T* op = out.plane(ib, ic);
            for (int oy = 0; oy < OH; ++oy) {
                for (int ox = 0; ox < OW; ++ox) {
                    int best = (2 * oy) * W + 2 * ox;
                    T val = ip[best];
                    const int cand[3] = {best + 1, best + W, best + W + 1};
                    for (int idx : cand) {
                        if (ip[idx] > val) {
                            val = ip[idx];
                            best = idx;
                        }
                    }
                    op[oy * OW + ox] = val;
                    arg[a++] = best;
                }
            }
        }
    }
    return tape.record(std::move(out), tape.needs_grad(xv),
                       [xv, arg = std::move(arg)](Tape<T>& t, typename Tape<T>::Var self) {
        const Tensor4T<T>& g = t.grad(self);
        Tensor4T<T>& gx = t.grad_buffer(xv);
        const int B = g.n, C = g.c, OH = g.h, OW = g.w;
        size_t a = 0;
        for (int ib = 0; ib < B; ++ib) {
            for (int ic = 0; ic < C; ++ic) {
                const T* gp = g.plane(ib, ic);
                T* gip = gx.plane(ib, ic);
                for (int i = 0; i < OH * OW; ++i) gip[arg[a++]] += gp[i];
            }
        }
    });
}

namespace detail {

template <typename T>
struct AxisTap {
    int i0 = 0, i1 = 0;
    T w0 = T(1), w1 = T(0);
};

/// Half-pixel-centered taps for 2x upsampling: output o samples input at
/// (o + 0.5)/2 - 0.5, clamped to the edge.
template <typename T>
std::vector<AxisTap<T>> upsample_taps(int n_in) {
    std::vector<AxisTap<T>> taps(static_cast<size_t>(n_in) * 2);
    for (int o = 0; o < n_in * 2; ++o) {
        const double s = (o + 0.5) / 2.0 - 0.5;
        const double f = std::floor(s);
        const double t = s - f;
        AxisTap<T>& tap = taps[o];
        tap.i0 = std::clamp(static_cast<int>(f), 0, n_in - 1);
        tap.i1 = std::clamp(static_cast<int>(f) + 1, 0, n_in - 1);
        tap.w0 = static_cast<T>(1.0 - t);
        tap.w1 = static_cast<T>(t);
    }
    return taps;
}

}  // namespace detail

/// Bilinear 2x upsampling (half-pixel centers, edge clamped). Doubles H and W.
template <typename T>
typename Tape<T>::Var upsample2_bilinear(Tape<T>& tape, typename Tape<T>::Var xv) {
    const Tensor4T<T>& x = tape.value(xv);
    const int B = x.n, C = x.c, H = x.h, W = x.w;
    const auto ty = detail::upsample_taps<T>(H);
    const auto tx = detail::upsample_taps<T>(W);
    Tensor4T<T> out(B, C, H * 2, W * 2);
    for (int ib = 0; ib < B; ++ib) {
        for (int ic = 0; ic < C; ++ic) {
            const T* ip = x.plane(ib, ic);
            T* op = out.plane(ib, ic);
            for (int oy = 0; oy < H * 2; ++oy) {
                const auto& ay = ty[oy];
                const T* r0 = ip + ay.i0 * W;
                const T* r1 = ip + ay.i1 * W;
                T* dst = op + oy * (W * 2);
                for (int ox = 0; ox < W * 2; ++ox) {
                    const auto& ax = tx[ox];
                    dst[ox] = ay.w0 * (ax.w0 * r0[ax.i0] + ax.w1 * r0[ax.i1]) +
                              ay.w1 * (ax.w0 * r1[ax.i0] + ax.w1 * r1[ax.i1]);
                }
            }
        }
    }
    return tape.record(std::move(out), tape.needs_grad(xv),
                       [xv, ty, tx](Tape<T>& t, typename Tape<T>::Var self) {
        const Tensor4T<T>& g = t.grad(self);
        Tensor4T<T>& gx = t.grad_buffer(xv);
        const int B = gx.n, C = gx.c, W = gx.w;
        const int OH = g.h, OW = g.w;
        for (int ib = 0; ib < B; ++ib) {
            for (int ic = 0; ic < C; ++ic) {
                const T* gp = g.plane(ib, ic);
                T* gip = gx.plane(ib, ic);
                for (int oy = 0; oy < OH; ++oy) {
                    const auto& ay = ty[oy];
                    for (int ox = 0; ox < OW; ++ox) {
                        const auto& ax = tx[ox];
                        const T gv = gp[oy * OW + ox];
                        gip[ay.i0 * W + ax.i0] += ay.w0 * ax.w0 * gv;
                        gip[ay.i0 * W + ax.i1] += ay.w0 * ax.w1 * gv;
                        gip[ay.i1 * W + ax.i0] += ay.w1 * ax.w0 * gv;
                        gip[ay.i1 * W + ax.i1] += ay.w1 * ax.w1 * gv;
                    }
                }
            }
        }
    });
}

/// Concatenates along the channel axis; batch and spatial dims must match.
template <typename T>
typename Tape<T>::Var concat_channels(Tape<T>& tape, typename Tape<T>::Var av,
                                      typename Tape<T>::Var bv) {
    const Tensor4T<T>& a = tape.value(av);
    const Tensor4T<T>& b = tape.value(bv);
    if (a.n != b.n || a.h != b.h || a.w != b.w) {
        throw ShapeError("concat_channels requires matching batch and spatial dims");
    }
    Tensor4T<T> out(a.n, a.c + b.c, a.h, a.w);
    const size_t plane = static_cast<size_t>(a.h) * a.w;
    for (int ib = 0; ib < a.n; ++ib) {
        for (int ic = 0; ic < a.c; ++ic) {
            std::copy_n(a.plane(ib, ic), plane, out.plane(ib, ic));
        }
        for (int ic = 0; ic < b.c; ++ic) {
            std::copy_n(b.plane(ib, ic), plane, out.plane(ib, a.c + ic));
        }
    }
    const bool needs = tape.needs_grad(av) || tape.needs_grad(bv);
    return tape.record(std::move(out), needs,
                       [av, bv](Tape<T>& t, typename Tape<T>::Var self) {
        const Tensor4T<T>& g = t.grad(self);
        const int ca = t.value(av).c;
        const size_t plane = static_cast<size_t>(g.h) * g.w;
        if (t.needs_grad(av)) {
            Tensor4T<T>& ga = t.grad_buffer(av);
            for (int ib = 0; ib < g.n; ++ib) {
                for (int ic = 0; ic < ca; ++ic) {
                    const T* src = g.plane(ib, ic);
                    T* dst = ga.plane(ib, ic);
                    for (size_t i = 0; i < plane; ++i) dst[i] += src[i];
                }
            }
        }
        if (t.needs_grad(bv)) {
            Tensor4T<T>& gb = t.grad_buffer(bv);
            for (int ib = 0; ib < g.n; ++ib) {
                for (int ic = ca; ic < g.c; ++ic) {
                    const T* src = g.plane(ib, ic);
                    T* dst = gb.plane(ib, ic - ca);
                    for (size_t i = 0; i < plane; ++i) dst[i] += src[i];
                }
            }
        }
    });
}

/// Pads H and W to even by reflecting the second-to-last row/column (the
/// last one when the axis has size 1). No-op on already-even dims.
template <typename T>
typename Tape<T>::Var reflect_pad_even(Tape<T>& tape, typename Tape<T>::Var xv) {
    const Tensor4T<T>& x = tape.value(xv);
    const int H = x.h, W = x.w;
    const int NH = H + (H % 2), NW = W + (W % 2);
    if (NH == H && NW == W) return xv;
    const int src_y = H >= 2 ? H - 2 : 0;
    const int src_x = W >= 2 ? W - 2 : 0;
    auto map_y = [&](int y) { return y < H ? y : src_y; };
    auto map_x = [&](int x_) { return x_ < W ? x_ : src_x; };
    Tensor4T<T> out(x.n, x.c, NH, NW);
    for (int ib = 0; ib < x.n; ++ib) {
        for (int ic = 0; ic < x.c; ++ic) {
            const T* ip = x.plane(ib, ic);
            T* op = out.plane(ib, ic);
            for (int y = 0; y < NH; ++y) {
                for (int x_ = 0; x_ < NW; ++x_) {
                    op[y * NW + x_] = ip[map_y(y) * W + map_x(x_)];
                }
            }
        }
    }
    return tape.record(std::move(out), tape.needs_grad(xv),
                       [xv](Tape<T>& t, typename Tape<T>::Var self) {
        const Tensor4T<T>& g = t.grad(self);
        Tensor4T<T>& gx = t.grad_buffer(xv);
        const int H = gx.h, W = gx.w, NH = g.h, NW = g.w;
        const int src_y = H >= 2 ? H - 2 : 0;
        const int src_x = W >= 2 ? W - 2 : 0;
        for (int ib = 0; ib < g.n; ++ib) {
            for (int ic = 0; ic < g.c; ++ic) {
                const T* gp = g.plane(ib, ic);
                T* gip = gx.plane(ib, ic);
                for (int y = 0; y < NH; ++y) {
                    const int sy = y < H ? y : src_y;
                    for (int x_ = 0; x_ < NW; ++x_) {
                        gip[sy * W + (x_ < W ? x_ : src_x)] += gp[y * NW + x_];
                    }
                }
            }
        }
    });
}

/// Keeps the top-left h x w region.
template <typename T>
typename Tape<T>::Var crop_spatial(Tape<T>& tape, typename Tape<T>::Var xv, int h, int w) {
    const Tensor4T<T>& x = tape.value(xv);
    if (h < 1 || w < 1 || h > x.h || w > x.w) {
        throw ShapeError("crop_spatial target exceeds input size");
    }
    if (h == x.h && w == x.w) return xv;
    Tensor4T<T> out(x.n, x.c, h, w);
    for (int ib = 0; ib < x.n; ++ib) {
        for (int ic = 0; ic < x.c; ++ic) {
            const T* ip = x.plane(ib, ic);
            T* op = out.plane(ib, ic);
            for (int y = 0; y < h; ++y) std::copy_n(ip + y * x.w, w, op + y * w);
        }
    }
    return tape.record(std::move(out), tape.needs_grad(xv),
                       [xv](Tape<T>& t, typename Tape<T>::Var self) {
        const Tensor4T<T>& g = t.grad(self);
        Tensor4T<T>& gx = t.grad_buffer(xv);
        for (int ib = 0; ib < g.n; ++ib) {
            for (int ic = 0; ic < g.c; ++ic) {
                const T* gp = g.plane(ib, ic);
                T* gip = gx.plane(ib, ic);
                for (int y = 0; y < g.h; ++y) {
                    for (int x_ = 0; x_ < g.w; ++x_) gip[y * gx.w + x_] += gp[y * g.w + x_];
                }
            }
        }
    });
}

/// Samples every channel of a (1, C, H, W) map at N continuous coordinates
/// with the same clamped bilinear scheme the inference sampler uses.
/// Output is (1, C, 1, N).
template <typename T>
typename Tape<T>::Var bilinear_gather(Tape<T>& tape, typename Tape<T>::Var fv,
                                      std::span<const Vec2> coords) {
    const Tensor4T<T>& f = tape.value(fv);
    if (f.n != 1) throw ShapeError("bilinear_gather expects batch size 1");
    if (coords.empty()) throw ShapeError("bilinear_gather requires at least one point");
    const int H = f.h, W = f.w, C = f.c, N = static_cast<int>(coords.size());

    struct Tap {
        int x0, x1, y0, y1;
        T w00, w01, w10, w11;
    };
    std::vector<Tap> taps(coords.size());
    for (size_t j = 0; j < coords.size(); ++j) {
        const Vec2& p = coords[j];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error("non-finite sample coordinate");
        }
        const double cx = std::clamp(p.x, 0.0, static_cast<double>(W - 1));
        const double cy = std::clamp(p.y, 0.0, static_cast<double>(H - 1));
        Tap& t = taps[j];
        t.x0 = std::clamp(static_cast<int>(std::floor(cx)), 0, W - 1);
        t.y0 = std::clamp(static_cast<int>(std::floor(cy)), 0, H - 1);
        t.x1 = std::min(t.x0 + 1, W - 1);
        t.y1 = std::min(t.y0 + 1, H - 1);
        const double fx = cx - t.x0, fy = cy - t.y0;
        t.w00 = static_cast<T>((1.0 - fy) * (1.0 - fx));
        t.w01 = static_cast<T>((1.0 - fy) * fx);
        t.w10 = static_cast<T>(fy * (1.0 - fx));
        t.w11 = static_cast<T>(fy * fx);
    }

    Tensor4T<T> out(1, C, 1, N);
    for (int ic = 0; ic < C; ++ic) {
        const T* fp = f.plane(0, ic);
        T* op = out.plane(0, ic);
        for (int j = 0; j < N; ++j) {
            const Tap& t = taps[j];
            op[j] = t.w00 * fp[t.y0 * W + t.x0] + t.w01 * fp[t.y0 * W + t.x1] +
                    t.w10 * fp[t.y1 * W + t.x0] + t.w11 * fp[t.y1 * W + t.x1];
        }
    }
    return tape.record(std::move(out), tape.needs_grad(fv),
                       [fv, taps = std::move(taps)](Tape<T>& t, typename Tape<T>::Var self) {
        const Tensor4T<T>& g = t.grad(self);
        Tensor4T<T>& gf = t.grad_buffer(fv);
        const int W = gf.w;
        for (int ic = 0; ic < g.c; ++ic) {
            const T* gp = g.plane(0, ic);
            T* fp = gf.plane(0, ic);
            for (size_t j = 0; j < taps.size(); ++j) {
                const auto& tp = taps[j];
                const T gv = gp[j];
                fp[tp.y0 * W + tp.x0] += tp.w00 * gv;
                fp[tp.y0 * W + tp.x1] += tp.w01 * gv;
                fp[tp.y1 * W + tp.x0] += tp.w10 * gv;
                fp[tp.y1 * W + tp.x1] += tp.w11 * gv;
            }
        }
    });
}

/// Sum of every element, as a (1, 1, 1, 1) scalar.
template <typename T>
typename Tape<T>::Var reduce_sum(Tape<T>& tape, typename Tape<T>::Var xv) {
    const Tensor4T<T>& x = tape.value(xv);
    T acc = T(0);
    for (const T v : x.data) acc += v;
    Tensor4T<T> out(1, 1, 1, 1);
    out.data[0] = acc;
    return tape.record(std::move(out), tape.needs_grad(xv),
                       [xv](Tape<T>& t, typename Tape<T>::Var self) {
        const T g = t.grad(self).data[0];
        for (T& v : t.grad_buffer(xv).data) v += g;
    });
}

/// Loss for a (1, C, 1, N) prediction against a constant target of the same
/// shape: sum of squared per-point residual norms divided by N (the squared
/// channel residuals are summed, the point count is averaged over).
template <typename T>
typename Tape<T>::Var offset_mse(Tape<T>& tape, typename Tape<T>::Var pv,
                                 const Tensor4T<T>& target) {
    const Tensor4T<T>& p = tape.value(pv);
    if (!p.same_shape(target)) throw ShapeError("offset_mse target shape mismatch");
    if (p.h != 1 || p.n != 1) throw ShapeError("offset_mse expects (1, C, 1, N)");
    const T inv_n = T(1) / static_cast<T>(p.w);
    T acc = T(0);
    for (size_t i = 0; i < p.size(); ++i) {
        const T d = p.data[i] - target.data[i];
        acc += d * d;
    }
    Tensor4T<T> out(1, 1, 1, 1);
    out.data[0] = acc * inv_n;
    return tape.record(std::move(out), tape.needs_grad(pv),
                       [pv, target, inv_n](Tape<T>& t, typename Tape<T>::Var self) {
        const T g = t.grad(self).data[0];
        const Tensor4T<T>& p = t.value(pv);
        Tensor4T<T>& gp = t.grad_buffer(pv);
        for (size_t i = 0; i < p.size(); ++i) {
            gp.data[i] += T(2) * inv_n * (p.data[i] - target.data[i]) * g;
        }
    });
}

}  // namespace nae
