// Copyright 2026 The fade-upsampling Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference implementations written independently of the library kernels:
// plain nested loops over the mathematical definitions.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fade/random.hpp"
#include "fade/tensor.hpp"

namespace oracle {

using fade::PadSpec;
using fade::Shape;
using fade::Tensor;

template <typename T>
Tensor<T> conv(const Tensor<T>& x, const Tensor<T>& w, const std::type_identity_t<Tensor<T>>* b, int stride,
               PadSpec pad) {
  const int kh = w.h(), kw = w.w();
  const int oh = (x.h() + pad.top + pad.bottom - kh) / stride + 1;
  const int ow = (x.w() + pad.left + pad.right - kw) / stride + 1;
  Tensor<T> out({x.n(), w.n(), oh, ow});
  for (int n = 0; n < x.n(); ++n)
    for (int o = 0; o < w.n(); ++o)
      for (int y = 0; y < oh; ++y)
        for (int xx = 0; xx < ow; ++xx) {
          T acc = b ? (*b)[o] : T(0);
          for (int c = 0; c < x.c(); ++c)
            for (int ky = 0; ky < kh; ++ky)
              for (int kx = 0; kx < kw; ++kx) {
                const int iy = y * stride + ky - pad.top, ix = xx * stride + kx - pad.left;
                if (iy >= 0 && iy < x.h() && ix >= 0 && ix < x.w())
                  acc += w.at(o, c, ky, kx) * x.at(n, c, iy, ix);
              }
          out.at(n, o, y, xx) = acc;
        }
  return out;
}

template <typename T>
Tensor<T> depthwise(const Tensor<T>& x, const Tensor<T>& w, const std::type_identity_t<Tensor<T>>* b, PadSpec pad) {
  Tensor<T> out({x.n(), x.c(), x.h() + pad.top + pad.bottom - w.h() + 1,
                 x.w() + pad.left + pad.right - w.w() + 1});
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c)
      for (int y = 0; y < out.h(); ++y)
        for (int xx = 0; xx < out.w(); ++xx) {
          T acc = b ? (*b)[c] : T(0);
          for (int ky = 0; ky < w.h(); ++ky)
            for (int kx = 0; kx < w.w(); ++kx) {
              const int iy = y + ky - pad.top, ix = xx + kx - pad.left;
              if (iy >= 0 && iy < x.h() && ix >= 0 && ix < x.w())
                acc += w.at(c, 0, ky, kx) * x.at(n, c, iy, ix);
            }
          out.at(n, c, y, xx) = acc;
        }
  return out;
}

/// out(c, i, j) = sum_m k(m, i, j) x(c, i/2 + wy, j/2 + wx)
template <typename T>
Tensor<T> reassemble(const Tensor<T>& x, const Tensor<T>& k, int K) {
  Tensor<T> out({x.n(), x.c(), 2 * x.h(), 2 * x.w()});
  const int r = K / 2;
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c)
      for (int i = 0; i < 2 * x.h(); ++i)
        for (int j = 0; j < 2 * x.w(); ++j) {
          T acc = 0;
          for (int m = 0; m < K * K; ++m) {
            const int y = i / 2 + m / K - r, xx = j / 2 + m % K - r;
            if (y >= 0 && y < x.h() && xx >= 0 && xx < x.w())
              acc += k.at(n, m, i, j) * x.at(n, c, y, xx);
          }
          out.at(n, c, i, j) = acc;
        }
  return out;
}

/// Owning copy, safe to iterate when t is a temporary.
template <typename T>
std::vector<T> values(const Tensor<T>& t) {
  return {t.data().begin(), t.data().end()};
}

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

template <typename T>
double max_rel(const Tensor<T>& a, const Tensor<T>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, rel(a[i], b[i]));
  return m;
}

template <typename T>
Tensor<T> random(Shape s, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  fade::Rng rng(seed);
  return fade::random_tensor<T>(s, rng, lo, hi);
}

}  // namespace oracle
