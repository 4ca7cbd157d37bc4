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

#include "fade/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conv_kernels.hpp"

namespace fade {

std::string Shape::str() const {
  std::ostringstream os;
  os << n << "x" << c << "x" << h << "x" << w;
  return os.str();
}

namespace {

void check_shape(const Shape& s) {
  if (s.n < 1 || s.c < 1 || s.h < 1 || s.w < 1)
    throw ShapeError("tensor dims must be >= 1, got " + s.str());
}

void require_same(const Shape& a, const Shape& b, const char* op) {
  if (a != b)
    throw ShapeError(std::string(op) + ": shape mismatch " + a.str() +
                     " vs " + b.str());
}

}  // namespace

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill) : shape_(shape) {
  check_shape(shape);
  data_.assign(shape.numel(), fill);
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data)
    : shape_(shape), data_(std::move(data)) {
  check_shape(shape);
  if (data_.size() != shape.numel())
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match " + shape.str());
}

template <typename T>
bool Tensor<T>::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](T v) { return std::isfinite(v); });
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weight,
                 const std::type_identity_t<Tensor<T>>* bias, int stride, PadSpec pad) {
  const Shape& ws = weight.shape();
  if (x.c() != ws.c)
    throw ShapeError("conv2d: input has " + std::to_string(x.c()) +
                     " channels, weight expects " + std::to_string(ws.c));
  if (bias && bias->numel() != static_cast<std::size_t>(ws.n))
    throw ShapeError("conv2d: bias length does not match out_channels");
  const auto g = detail::make_geometry(x.shape(), ws.h, ws.w, stride, pad);
  Tensor<T> out({x.n(), ws.n, g.oh, g.ow});
  for (int n = 0; n < x.n(); ++n) {
    for (int o = 0; o < ws.n; ++o) {
      T* op = out.plane(n, o);
      if (bias) std::fill(op, op + out.shape().plane(), (*bias)[o]);
      for (int i = 0; i < ws.c; ++i) {
        const T* ip = x.plane(n, i);
        for (int ky = 0; ky < ws.h; ++ky)
          for (int kx = 0; kx < ws.w; ++kx)
            detail::tap_forward(op, ip, g, ky, kx, weight.at(o, i, ky, kx));
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> conv2d_depthwise(const Tensor<T>& x, const Tensor<T>& weight,
                           const std::type_identity_t<Tensor<T>>* bias, int stride, PadSpec pad) {
  const Shape& ws = weight.shape();
  if (ws.c != 1 || ws.n != x.c())
    throw ShapeError("conv2d_depthwise: weight " + ws.str() +
                     " does not match input channels " +
                     std::to_string(x.c()));
  if (bias && bias->numel() != static_cast<std::size_t>(ws.n))
    throw ShapeError("conv2d_depthwise: bias length mismatch");
  const auto g = detail::make_geometry(x.shape(), ws.h, ws.w, stride, pad);
  Tensor<T> out({x.n(), x.c(), g.oh, g.ow});
  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < x.c(); ++c) {
      T* op = out.plane(n, c);
      if (bias) std::fill(op, op + out.shape().plane(), (*bias)[c]);
      for (int ky = 0; ky < ws.h; ++ky)
        for (int kx = 0; kx < ws.w; ++kx)
          detail::tap_forward(op, x.plane(n, c), g, ky, kx,
                              weight.at(c, 0, ky, kx));
    }
  }
  return out;
}

template <typename T>
Tensor<T> conv1x1(const Tensor<T>& x, const Tensor<T>& weight,
                  const std::type_identity_t<Tensor<T>>* bias) {
  if (weight.h() != 1 || weight.w() != 1)
    throw ShapeError("conv1x1: kernel must be 1x1, got " +
                     weight.shape().str());
  return conv2d(x, weight, bias, 1, PadSpec{});
}

template <typename T>
Tensor<T> interp_nearest_x2(const Tensor<T>& x) {
  const Shape& s = x.shape();
  Tensor<T> out({s.n, s.c, 2 * s.h, 2 * s.w});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const T* ip = x.plane(n, c);
      T* op = out.plane(n, c);
      for (int y = 0; y < 2 * s.h; ++y) {
        const T* irow = ip + static_cast<std::size_t>(y / 2) * s.w;
        T* orow = op + static_cast<std::size_t>(y) * 2 * s.w;
        for (int xx = 0; xx < 2 * s.w; ++xx) orow[xx] = irow[xx / 2];
      }
    }
  return out;
}

namespace {

// Source coordinate and blend weight for one output index of a x2 resize.
struct LinearTap {
  int i0, i1;
  double frac;
};

LinearTap linear_tap(int dst, int in_size, bool align_corners) {
  const int out_size = 2 * in_size;
  double src;
  if (align_corners) {
    src = out_size > 1 ? dst * static_cast<double>(in_size - 1) / (out_size - 1)
                       : 0.0;
  } else {
    src = std::max(0.0, (dst + 0.5) / 2.0 - 0.5);
  }
  int i0 = std::min(static_cast<int>(std::floor(src)), in_size - 1);
  int i1 = std::min(i0 + 1, in_size - 1);
  return {i0, i1, src - i0};
}

}  // namespace

template <typename T>
Tensor<T> interp_bilinear_x2(const Tensor<T>& x, bool align_corners) {
  const Shape& s = x.shape();
  Tensor<T> out({s.n, s.c, 2 * s.h, 2 * s.w});
  std::vector<LinearTap> ty, tx;
  for (int i = 0; i < 2 * s.h; ++i) ty.push_back(linear_tap(i, s.h, align_corners));
  for (int j = 0; j < 2 * s.w; ++j) tx.push_back(linear_tap(j, s.w, align_corners));
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int i = 0; i < 2 * s.h; ++i)
        for (int j = 0; j < 2 * s.w; ++j) {
          const auto& a = ty[i];
          const auto& b = tx[j];
          const T fx = static_cast<T>(b.frac);
          const T top = std::lerp(x.at(n, c, a.i0, b.i0), x.at(n, c, a.i0, b.i1), fx);
          const T bot = std::lerp(x.at(n, c, a.i1, b.i0), x.at(n, c, a.i1, b.i1), fx);
          out.at(n, c, i, j) = std::lerp(top, bot, static_cast<T>(a.frac));
        }
  return out;
}

template <typename T>
Tensor<T> maxpool2x2(const Tensor<T>& x) {
  const Shape& s = x.shape();
  if (s.h % 2 || s.w % 2)
    throw ShapeError("maxpool2x2: spatial dims must be even, got " + s.str());
  Tensor<T> out({s.n, s.c, s.h / 2, s.w / 2});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < s.h / 2; ++y)
        for (int xx = 0; xx < s.w / 2; ++xx) {
          T m = x.at(n, c, 2 * y, 2 * xx);
          m = std::max(m, x.at(n, c, 2 * y, 2 * xx + 1));
          m = std::max(m, x.at(n, c, 2 * y + 1, 2 * xx));
          m = std::max(m, x.at(n, c, 2 * y + 1, 2 * xx + 1));
          out.at(n, c, y, xx) = m;
        }
  return out;
}

template <typename T>
Tensor<T> softmax_channel(const Tensor<T>& x) {
  const Shape& s = x.shape();
  const std::size_t hw = s.plane();
  Tensor<T> out(s);
  std::vector<T> mx(hw), sum(hw);
  for (int n = 0; n < s.n; ++n) {
    const T* base = x.plane(n, 0);
    T* obase = out.plane(n, 0);
    std::copy(base, base + hw, mx.begin());
    for (int c = 1; c < s.c; ++c)
      for (std::size_t p = 0; p < hw; ++p)
        mx[p] = std::max(mx[p], base[c * hw + p]);
    std::fill(sum.begin(), sum.end(), T(0));
    for (int c = 0; c < s.c; ++c)
      for (std::size_t p = 0; p < hw; ++p) {
        const T e = std::exp(base[c * hw + p] - mx[p]);
        obase[c * hw + p] = e;
        sum[p] += e;
      }
    for (int c = 0; c < s.c; ++c)
      for (std::size_t p = 0; p < hw; ++p) obase[c * hw + p] /= sum[p];
  }
  return out;
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const T v = x[i];
    if (v >= 0) {
      out[i] = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      out[i] = e / (T(1) + e);
    }
  }
  return out;
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = x[i] > 0 ? x[i] : T(0);
  return out;
}

template <typename T>
Tensor<T> pixel_shuffle_x2(const Tensor<T>& x) {
  const Shape& s = x.shape();
  if (s.c % 4)
    throw ShapeError("pixel_shuffle_x2: channels must be divisible by 4, got " +
                     std::to_string(s.c));
  Tensor<T> out({s.n, s.c / 4, 2 * s.h, 2 * s.w});
  for (int n = 0; n < s.n; ++n)
    for (int co = 0; co < s.c / 4; ++co)
      for (int r = 0; r < 2; ++r)
        for (int q = 0; q < 2; ++q)
          for (int y = 0; y < s.h; ++y)
            for (int xx = 0; xx < s.w; ++xx)
              out.at(n, co, 2 * y + r, 2 * xx + q) =
                  x.at(n, 4 * co + 2 * r + q, y, xx);
  return out;
}

template <typename T>
Tensor<T> pixel_unshuffle_x2(const Tensor<T>& x) {
  const Shape& s = x.shape();
  if (s.h % 2 || s.w % 2)
    throw ShapeError("pixel_unshuffle_x2: spatial dims must be even");
  Tensor<T> out({s.n, s.c * 4, s.h / 2, s.w / 2});
  for (int n = 0; n < s.n; ++n)
    for (int co = 0; co < s.c; ++co)
      for (int r = 0; r < 2; ++r)
        for (int q = 0; q < 2; ++q)
          for (int y = 0; y < s.h / 2; ++y)
            for (int xx = 0; xx < s.w / 2; ++xx)
              out.at(n, 4 * co + 2 * r + q, y, xx) =
                  x.at(n, co, 2 * y + r, 2 * xx + q);
  return out;
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same(a.shape(), b.shape(), "add");
  Tensor<T> out(a.shape());
  for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a[i] + b[i];
  return out;
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s) {
  Tensor<T> out(a.shape());
  for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a[i] * s;
  return out;
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w)
    throw ShapeError("concat_channels: mismatch " + sa.str() + " vs " +
                     sb.str());
  Tensor<T> out({sa.n, sa.c + sb.c, sa.h, sa.w});
  const std::size_t hw = sa.plane();
  for (int n = 0; n < sa.n; ++n) {
    std::copy(a.plane(n, 0), a.plane(n, 0) + sa.c * hw, out.plane(n, 0));
    std::copy(b.plane(n, 0), b.plane(n, 0) + sb.c * hw, out.plane(n, sa.c));
  }
  return out;
}

template <typename T>
Tensor<T> subsample_x2(const Tensor<T>& x) {
  const Shape& s = x.shape();
  Tensor<T> out({s.n, s.c, (s.h + 1) / 2, (s.w + 1) / 2});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < out.h(); ++y)
        for (int xx = 0; xx < out.w(); ++xx)
          out.at(n, c, y, xx) = x.at(n, c, 2 * y, 2 * xx);
  return out;
}

template <typename T>
Tensor<T> interleave_phases(const Tensor<T>& p00, const Tensor<T>& p01,
                            const Tensor<T>& p10, const Tensor<T>& p11) {
  const Shape& s = p00.shape();
  require_same(s, p01.shape(), "interleave_phases");
  require_same(s, p10.shape(), "interleave_phases");
  require_same(s, p11.shape(), "interleave_phases");
  const Tensor<T>* phases[4] = {&p00, &p01, &p10, &p11};
  Tensor<T> out({s.n, s.c, 2 * s.h, 2 * s.w});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int p = 0; p < 4; ++p)
        for (int y = 0; y < s.h; ++y)
          for (int xx = 0; xx < s.w; ++xx)
            out.at(n, c, 2 * y + p / 2, 2 * xx + p % 2) =
                phases[p]->at(n, c, y, xx);
  return out;
}

template <typename T>
Tensor<T> extract_phase(const Tensor<T>& x, int r, int s) {
  const Shape& sh = x.shape();
  if (sh.h % 2 || sh.w % 2)
    throw ShapeError("extract_phase: spatial dims must be even");
  Tensor<T> out({sh.n, sh.c, sh.h / 2, sh.w / 2});
  for (int n = 0; n < sh.n; ++n)
    for (int c = 0; c < sh.c; ++c)
      for (int y = 0; y < sh.h / 2; ++y)
        for (int xx = 0; xx < sh.w / 2; ++xx)
          out.at(n, c, y, xx) = x.at(n, c, 2 * y + r, 2 * xx + s);
  return out;
}

template <typename T>
Tensor<T> gather_batch(const Tensor<T>& x, std::span<const int> order) {
  const Shape& s = x.shape();
  if (order.empty()) throw ShapeError("gather_batch: empty selection");
  Tensor<T> out({static_cast<int>(order.size()), s.c, s.h, s.w});
  const std::size_t per = static_cast<std::size_t>(s.c) * s.plane();
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] < 0 || order[k] >= s.n)
      throw ShapeError("gather_batch: index out of range");
    std::copy(x.plane(order[k], 0), x.plane(order[k], 0) + per,
              out.plane(static_cast<int>(k), 0));
  }
  return out;
}

template <typename T>
Tensor<T> slice_batch(const Tensor<T>& x, int begin, int count) {
  std::vector<int> idx(count);
  for (int i = 0; i < count; ++i) idx[i] = begin + i;
  return gather_batch(x, std::span<const int>(idx));
}

template <typename T>
T max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
  require_same(a.shape(), b.shape(), "max_abs_diff");
  T m = 0;
  for (std::size_t i = 0; i < a.numel(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <typename T>
double max_rel_diff(const Tensor<T>& a, const Tensor<T>& b) {
  require_same(a.shape(), b.shape(), "max_rel_diff");
  double m = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    const double x = a[i], y = b[i];
    const double denom = std::max({1.0, std::abs(x), std::abs(y)});
    m = std::max(m, std::abs(x - y) / denom);
  }
  return m;
}

#define FADE_INSTANTIATE(T)                                                   \
  template class Tensor<T>;                                                   \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&,               \
                            const Tensor<T>*, int, PadSpec);                  \
  template Tensor<T> conv2d_depthwise(const Tensor<T>&, const Tensor<T>&,     \
                                      const Tensor<T>*, int, PadSpec);        \
  template Tensor<T> conv1x1(const Tensor<T>&, const Tensor<T>&,              \
                             const Tensor<T>*);                               \
  template Tensor<T> interp_nearest_x2(const Tensor<T>&);                     \
  template Tensor<T> interp_bilinear_x2(const Tensor<T>&, bool);              \
  template Tensor<T> maxpool2x2(const Tensor<T>&);                            \
  template Tensor<T> softmax_channel(const Tensor<T>&);                       \
  template Tensor<T> sigmoid(const Tensor<T>&);                               \
  template Tensor<T> relu(const Tensor<T>&);                                  \
  template Tensor<T> pixel_shuffle_x2(const Tensor<T>&);                      \
  template Tensor<T> pixel_unshuffle_x2(const Tensor<T>&);                    \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> scale(const Tensor<T>&, T);                              \
  template Tensor<T> concat_channels(const Tensor<T>&, const Tensor<T>&);     \
  template Tensor<T> subsample_x2(const Tensor<T>&);                          \
  template Tensor<T> interleave_phases(const Tensor<T>&, const Tensor<T>&,    \
                                       const Tensor<T>&, const Tensor<T>&);   \
  template Tensor<T> extract_phase(const Tensor<T>&, int, int);               \
  template Tensor<T> gather_batch(const Tensor<T>&, std::span<const int>);    \
  template Tensor<T> slice_batch(const Tensor<T>&, int, int);                 \
  template T max_abs_diff(const Tensor<T>&, const Tensor<T>&);                \
  template double max_rel_diff(const Tensor<T>&, const Tensor<T>&);

FADE_INSTANTIATE(float)
FADE_INSTANTIATE(double)

}  // namespace fade
