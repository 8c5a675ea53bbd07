#pragma once

#include <cstddef>
#include <vector>

#include "nae/errors.hpp"

namespace nae {

/// Dense NCHW tensor. Templated so the same graph code runs in float for
/// production and double for finite-difference verification.
template <typename T>
struct Tensor4T {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> data;

    Tensor4T() = default;
    Tensor4T(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_) {
        if (n_ < 1 || c_ < 1 || h_ < 1 || w_ < 1) {
            throw ShapeError("tensor dimensions must be positive");
        }
        data.assign(static_cast<size_t>(n_) * c_ * h_ * w_, T(0));
    }

    size_t size() const noexcept { return data.size(); }
    bool empty() const noexcept { return data.empty(); }

    bool same_shape(const Tensor4T& o) const noexcept {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    T& at(int in, int ic, int iy, int ix) noexcept {
        return data[((static_cast<size_t>(in) * c + ic) * h + iy) * w + ix];
    }
    const T& at(int in, int ic, int iy, int ix) const noexcept {
        return data[((static_cast<size_t>(in) * c + ic) * h + iy) * w + ix];
    }

    T* plane(int in, int ic) noexcept {
        return data.data() + (static_cast<size_t>(in) * c + ic) * h * w;
    }
    const T* plane(int in, int ic) const noexcept {
        return data.data() + (static_cast<size_t>(in) * c + ic) * h * w;
    }

    /// Elementwise copy into a possibly different scalar type.
    template <typename U>
    Tensor4T<U> cast() const {
        Tensor4T<U> out(n, c, h, w);
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

using Tensor4 = Tensor4T<float>;

}  // namespace nae
