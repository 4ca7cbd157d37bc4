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

#include "fade/assemble.hpp"

#include <algorithm>
#include <string>

namespace fade {

namespace {

void check_reassembly(const Shape& x, const Shape& k, ReassemblySpec spec) {
  if (spec.K < 1 || spec.K % 2 == 0)
    throw ConfigError("reassembly kernel size must be odd and >= 1, got " +
                      std::to_string(spec.K));
  if (k.c != spec.K * spec.K)
    throw ShapeError("kernel map has " + std::to_string(k.c) +
                     " channels, expected K*K = " + std::to_string(spec.K * spec.K));
  if (k.n != x.n || k.h != 2 * x.h || k.w != 2 * x.w)
    throw ShapeError("kernel map " + k.str() + " does not match decoder " +
                     x.str() + " at x2");
}

// Output columns j whose tap column j/2 + dx lands inside [0, W).
void tap_cols(int dx, int W, int& lo, int& hi) {
  lo = std::max(0, -2 * dx);
  hi = std::min(2 * W - 1, 2 * (W - 1 - dx) + 1);
}

// Visits every in-bounds (output, source) pair in a fixed order:
// n, tap m, channel c, row i, column j.
template <typename T, typename F>
void for_each_tap(const Shape& xs, int K, F&& f) {
  const int r = K / 2;
  const int H = xs.h, W = xs.w;
  for (int n = 0; n < xs.n; ++n)
    for (int m = 0; m < K * K; ++m) {
      const int dy = m / K - r, dx = m % K - r;
      int jlo, jhi;
      tap_cols(dx, W, jlo, jhi);
      if (jlo > jhi) continue;
      for (int c = 0; c < xs.c; ++c)
        for (int i = 0; i < 2 * H; ++i) {
          const int sy = i / 2 + dy;
          if (sy < 0 || sy >= H) continue;
          f(n, m, c, i, sy, jlo, jhi, dx);
        }
    }
}

template <typename T>
Tensor<T> gather_forward(const Tensor<T>& x_de, const Tensor<T>& k,
                         ReassemblySpec spec) {
  Tensor<T> out({x_de.n(), x_de.c(), 2 * x_de.h(), 2 * x_de.w()});
  const int W2 = 2 * x_de.w();
  for_each_tap<T>(x_de.shape(), spec.K,
                  [&](int n, int m, int c, int i, int sy, int jlo, int jhi, int dx) {
                    T* orow = out.plane(n, c) + static_cast<std::size_t>(i) * W2;
                    const T* krow = k.plane(n, m) + static_cast<std::size_t>(i) * W2;
                    const T* xrow = x_de.plane(n, c) +
                                    static_cast<std::size_t>(sy) * x_de.w();
                    for (int j = jlo; j <= jhi; ++j)
                      orow[j] += krow[j] * xrow[j / 2 + dx];
                  });
  return out;
}

}  // namespace

template <typename T>
Tensor<T> reassemble(const Tensor<T>& x_de, const KernelMap<T>& kernels,
                     ReassemblySpec spec) {
  if (!kernels.normalized)
    throw ConfigError("reassemble requires a normalized kernel map");
  check_reassembly(x_de.shape(), kernels.weights.shape(), spec);
  return gather_forward(x_de, kernels.weights, spec);
}

template <typename T>
Var<T> reassemble(const Var<T>& x_de, const Var<T>& kernels, ReassemblySpec spec) {
  check_reassembly(x_de.shape(), kernels.shape(), spec);
  auto out = gather_forward(x_de.value(), kernels.value(), spec);
  const std::size_t xi = x_de.id(), ki = kernels.id();
  return x_de.tape().record(
      std::move(out), {x_de, kernels},
      [xi, ki, spec](Tape<T>& t, const Tensor<T>& g) {
        const Tensor<T>& xv = t.value(xi);
        const Tensor<T>& kv = t.value(ki);
        const int W2 = 2 * xv.w();
        const bool need_x = t.requires_grad(xi), need_k = t.requires_grad(ki);
        Tensor<T>* gx = need_x ? &t.grad_buffer(xi) : nullptr;
        Tensor<T>* gk = need_k ? &t.grad_buffer(ki) : nullptr;
        for_each_tap<T>(
            xv.shape(), spec.K,
            [&](int n, int m, int c, int i, int sy, int jlo, int jhi, int dx) {
              const std::size_t row = static_cast<std::size_t>(i) * W2;
              const T* grow = g.plane(n, c) + row;
              const std::size_t src = static_cast<std::size_t>(sy) * xv.w();
              if (gx) {
                const T* krow = kv.plane(n, m) + row;
                T* gxrow = gx->plane(n, c) + src;
                for (int j = jlo; j <= jhi; ++j) gxrow[j / 2 + dx] += krow[j] * grow[j];
              }
              if (gk) {
                const T* xrow = xv.plane(n, c) + src;
                T* gkrow = gk->plane(n, m) + row;
                for (int j = jlo; j <= jhi; ++j) gkrow[j] += grow[j] * xrow[j / 2 + dx];
              }
            });
      });
}

template Tensor<float> reassemble(const Tensor<float>&, const KernelMap<float>&, ReassemblySpec);
template Tensor<double> reassemble(const Tensor<double>&, const KernelMap<double>&, ReassemblySpec);
template Var<float> reassemble(const Var<float>&, const Var<float>&, ReassemblySpec);
template Var<double> reassemble(const Var<double>&, const Var<double>&, ReassemblySpec);

}  // namespace fade
