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

#pragma once

#include <algorithm>

#include "fade/tensor.hpp"

namespace fade::detail {

/// Spatial mapping shared by every convolution kernel:
/// input (oy * stride + ky - pad.top, ox * stride + kx - pad.left).
struct ConvGeometry {
  int ih, iw, oh, ow, kh, kw, stride;
  PadSpec pad;

  // Output columns whose tap kx lands inside the input row.
  void col_range(int kx, int& lo, int& hi) const {
    const int off = kx - pad.left;
    lo = off >= 0 ? 0 : (-off + stride - 1) / stride;
    const int last = iw - 1 - off;
    hi = last < 0 ? -1 : std::min(ow - 1, last / stride);
  }
};

inline ConvGeometry make_geometry(const Shape& in, int kh, int kw, int stride,
                                  PadSpec pad) {
  if (stride < 1) throw ShapeError("conv: stride must be >= 1");
  if (pad.top < 0 || pad.bottom < 0 || pad.left < 0 || pad.right < 0)
    throw ShapeError("conv: negative padding");
  const int sh = in.h + pad.top + pad.bottom - kh;
  const int sw = in.w + pad.left + pad.right - kw;
  if (sh < 0 || sw < 0)
    throw ShapeError("conv: non-positive output size for input " + in.str());
  return {in.h, in.w, sh / stride + 1, sw / stride + 1, kh, kw, stride, pad};
}

/// out[oy, ox] += wv * in[iy, ix] for one tap.
template <typename T>
void tap_forward(T* out, const T* in, const ConvGeometry& g, int ky, int kx,
                 T wv) {
  int lo, hi;
  g.col_range(kx, lo, hi);
  if (lo > hi) return;
  for (int oy = 0; oy < g.oh; ++oy) {
    const int iy = oy * g.stride + ky - g.pad.top;
    if (iy < 0 || iy >= g.ih) continue;
    T* orow = out + static_cast<std::size_t>(oy) * g.ow;
    const T* irow = in + static_cast<std::size_t>(iy) * g.iw;
    const int off = kx - g.pad.left;
    if (g.stride == 1) {
      for (int ox = lo; ox <= hi; ++ox) orow[ox] += wv * irow[ox + off];
    } else {
      for (int ox = lo; ox <= hi; ++ox)
        orow[ox] += wv * irow[ox * g.stride + off];
    }
  }
}

/// gin[iy, ix] += wv * gout[oy, ox] for one tap.
template <typename T>
void tap_backward_input(T* gin, const T* gout, const ConvGeometry& g, int ky,
                        int kx, T wv) {
  int lo, hi;
  g.col_range(kx, lo, hi);
  if (lo > hi) return;
  for (int oy = 0; oy < g.oh; ++oy) {
    const int iy = oy * g.stride + ky - g.pad.top;
    if (iy < 0 || iy >= g.ih) continue;
    const T* grow = gout + static_cast<std::size_t>(oy) * g.ow;
    T* irow = gin + static_cast<std::size_t>(iy) * g.iw;
    const int off = kx - g.pad.left;
    for (int ox = lo; ox <= hi; ++ox) irow[ox * g.stride + off] += wv * grow[ox];
  }
}

/// sum over output positions of gout[oy, ox] * in[iy, ix] for one tap.
template <typename T>
T tap_dot(const T* gout, const T* in, const ConvGeometry& g, int ky, int kx) {
  int lo, hi;
  g.col_range(kx, lo, hi);
  T acc = 0;
  if (lo > hi) return acc;
  for (int oy = 0; oy < g.oh; ++oy) {
    const int iy = oy * g.stride + ky - g.pad.top;
    if (iy < 0 || iy >= g.ih) continue;
    const T* grow = gout + static_cast<std::size_t>(oy) * g.ow;
    const T* irow = in + static_cast<std::size_t>(iy) * g.iw;
    const int off = kx - g.pad.left;
    for (int ox = lo; ox <= hi; ++ox) acc += grow[ox] * irow[ox * g.stride + off];
  }
  return acc;
}

}  // namespace fade::detail
