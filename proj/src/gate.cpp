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

#include "fade/gate.hpp"

#include <string>

namespace fade {

namespace {

void check_projector(const Shape& x, const Shape& w) {
  if (w.n != 1 || w.h != 1 || w.w != 1)
    throw ShapeError("gate projector must be (1, C, 1, 1), got " + w.str());
  if (w.c != x.c)
    throw ShapeError("gate projector expects " + std::to_string(w.c) +
                     " channels, decoder has " + std::to_string(x.c));
}

void check_fusion(const Shape& en, const Shape& up, const Shape& g) {
  if (en != up)
    throw ShapeError("fuse_gated: encoder " + en.str() + " vs upsampled " + up.str());
  if (g.n != en.n || g.c != 1 || g.h != en.h || g.w != en.w)
    throw ShapeError("fuse_gated: gate " + g.str() + " does not match " + en.str());
}

}  // namespace

template <typename T>
GateMap<T> generate_gate(const Tensor<T>& x_de, const ConvWeights<T>& projector) {
  check_projector(x_de.shape(), projector.weight.shape());
  return sigmoid(interp_nearest_x2(
      conv1x1(x_de, projector.weight, projector.bias_ptr())));
}

template <typename T>
Var<T> generate_gate(const Var<T>& x_de, const ConvParams<Var<T>>& projector) {
  check_projector(x_de.shape(), projector.weight.shape());
  return sigmoid(interp_nearest_x2(
      conv1x1(x_de, projector.weight, projector.bias_ptr())));
}

template <typename T>
Tensor<T> fuse_gated(const Tensor<T>& f_en, const Tensor<T>& f_up,
                     const GateMap<T>& g) {
  check_fusion(f_en.shape(), f_up.shape(), g.shape());
  Tensor<T> out(f_en.shape());
  const std::size_t hw = f_en.shape().plane();
  for (int n = 0; n < f_en.n(); ++n) {
    const T* gp = g.plane(n, 0);
    for (int c = 0; c < f_en.c(); ++c) {
      const T* ep = f_en.plane(n, c);
      const T* up = f_up.plane(n, c);
      T* op = out.plane(n, c);
      for (std::size_t p = 0; p < hw; ++p)
        op[p] = ep[p] * gp[p] + up[p] * (T(1) - gp[p]);
    }
  }
  return out;
}

template <typename T>
Var<T> fuse_gated(const Var<T>& f_en, const Var<T>& f_up, const Var<T>& g) {
  auto out = fuse_gated(f_en.value(), f_up.value(), g.value());
  const std::size_t ei = f_en.id(), ui = f_up.id(), gi = g.id();
  return f_en.tape().record(
      std::move(out), {f_en, f_up, g},
      [ei, ui, gi](Tape<T>& t, const Tensor<T>& go) {
        const Tensor<T>& ev = t.value(ei);
        const Tensor<T>& uv = t.value(ui);
        const Tensor<T>& gv = t.value(gi);
        const std::size_t hw = ev.shape().plane();
        Tensor<T>* ge = t.requires_grad(ei) ? &t.grad_buffer(ei) : nullptr;
        Tensor<T>* gu = t.requires_grad(ui) ? &t.grad_buffer(ui) : nullptr;
        Tensor<T>* gg = t.requires_grad(gi) ? &t.grad_buffer(gi) : nullptr;
        for (int n = 0; n < ev.n(); ++n) {
          const T* gp = gv.plane(n, 0);
          for (int c = 0; c < ev.c(); ++c) {
            const T* op = go.plane(n, c);
            for (std::size_t p = 0; p < hw; ++p) {
              if (ge) ge->plane(n, c)[p] += op[p] * gp[p];
              if (gu) gu->plane(n, c)[p] += op[p] * (T(1) - gp[p]);
              if (gg)
                gg->plane(n, 0)[p] +=
                    op[p] * (ev.plane(n, c)[p] - uv.plane(n, c)[p]);
            }
          }
        }
      });
}

template GateMap<float> generate_gate(const Tensor<float>&, const ConvWeights<float>&);
template GateMap<double> generate_gate(const Tensor<double>&, const ConvWeights<double>&);
template Var<float> generate_gate(const Var<float>&, const ConvParams<Var<float>>&);
template Var<double> generate_gate(const Var<double>&, const ConvParams<Var<double>>&);
template Tensor<float> fuse_gated(const Tensor<float>&, const Tensor<float>&, const GateMap<float>&);
template Tensor<double> fuse_gated(const Tensor<double>&, const Tensor<double>&, const GateMap<double>&);
template Var<float> fuse_gated(const Var<float>&, const Var<float>&, const Var<float>&);
template Var<double> fuse_gated(const Var<double>&, const Var<double>&, const Var<double>&);

}  // namespace fade
