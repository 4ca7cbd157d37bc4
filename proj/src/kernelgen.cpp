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

#include "fade/kernelgen.hpp"

#include <cmath>
#include <string>

namespace fade {

namespace {

constexpr PadSpec kPad1 = {1, 1, 1, 1};

void check_pair(const Shape& en, const Shape& de) {
  if (en.n != de.n || en.h != 2 * de.h || en.w != 2 * de.w)
    throw ShapeError("encoder " + en.str() + " and decoder " + de.str() +
                     " are not in an exact x2 relation");
}

void check_in_channels(const Shape& x, const Shape& w, const char* what) {
  if (x.c != w.c)
    throw ShapeError(std::string(what) + ": input has " + std::to_string(x.c) +
                     " channels, parameters expect " + std::to_string(w.c));
}

template <typename V>
void check_semishift(const V& x_en, const V& x_de, const SemiShiftParams<V>& p) {
  check_pair(x_en.shape(), x_de.shape());
  check_in_channels(x_en.shape(), p.compressor_en.weight.shape(), "encoder compressor");
  check_in_channels(x_de.shape(), p.compressor_de.weight.shape(), "decoder compressor");
  if (p.compressor_en.bias)
    throw ConfigError("semi-shift encoder compressor must not carry a bias");
  kernel_side(p.generator.weight.shape().n);
}

}  // namespace

int kernel_side(int channels) {
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(channels))));
  if (k * k != channels || k % 2 == 0)
    throw ShapeError("kernel map has " + std::to_string(channels) +
                     " channels, expected K*K with K odd");
  return k;
}

template <typename T>
int KernelMap<T>::K() const {
  return kernel_side(weights.c());
}

template <typename T>
KernelMap<T> semishift_direct(const Tensor<T>& x_en, const Tensor<T>& x_de,
                              const SemiShiftParams<Tensor<T>>& p) {
  check_semishift(x_en, x_de, p);
  const Tensor<T>& ae = p.compressor_en.weight;
  const Tensor<T>& ad = p.compressor_de.weight;
  const Tensor<T>& beta = p.generator.weight;
  if (beta.h() != 3 || beta.w() != 3 || beta.c() != ae.n() || ae.n() != ad.n())
    throw ShapeError("semishift_direct: generator must be (K*K, d, 3, 3)");
  const int N = x_en.n(), C = x_en.c(), d = ae.n(), KK = beta.n();
  const int H = x_de.h(), W = x_de.w();

  // Compressed features, one pixel at a time.
  Tensor<T> ce({N, d, 2 * H, 2 * W});
  Tensor<T> cd({N, d, H, W});
  for (int n = 0; n < N; ++n)
    for (int l = 0; l < d; ++l) {
      for (int y = 0; y < 2 * H; ++y)
        for (int x = 0; x < 2 * W; ++x) {
          T acc = 0;
          for (int k = 0; k < C; ++k) acc += ae.at(l, k, 0, 0) * x_en.at(n, k, y, x);
          ce.at(n, l, y, x) = acc;
        }
      const T a = p.compressor_de.bias ? (*p.compressor_de.bias)[l] : T(0);
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          T acc = 0;
          for (int k = 0; k < C; ++k) acc += ad.at(l, k, 0, 0) * x_de.at(n, k, y, x);
          cd.at(n, l, y, x) = acc + a;
        }
    }

  Tensor<T> out({N, KK, 2 * H, 2 * W});
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < KK; ++m)
      for (int i = 0; i < 2 * H; ++i)
        for (int j = 0; j < 2 * W; ++j) {
          T acc_en = 0, acc_de = 0;
          for (int l = 0; l < d; ++l)
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx) {
                const T b = beta.at(m, l, ky, kx);
                const int ey = i + ky - 1, ex = j + kx - 1;
                if (ey >= 0 && ey < 2 * H && ex >= 0 && ex < 2 * W)
                  acc_en += b * ce.at(n, l, ey, ex);
                const int dy = i / 2 + ky - 1, dx = j / 2 + kx - 1;
                if (dy >= 0 && dy < H && dx >= 0 && dx < W)
                  acc_de += b * cd.at(n, l, dy, dx);
              }
          const T bias = p.generator.bias ? (*p.generator.bias)[m] : T(0);
          out.at(n, m, i, j) = acc_en + acc_de + bias;
        }
  return {std::move(out), false};
}

template <typename V>
V semishift_h2l(const V& x_en, const V& x_de, const SemiShiftParams<V>& p) {
  check_semishift(x_en, x_de, p);
  const V ce = conv2d(x_en, p.compressor_en.weight, nullptr, 1, PadSpec{});
  const V cd = conv2d(x_de, p.compressor_de, 1, PadSpec{});
  const V dec = conv2d(cd, p.generator.weight, nullptr, 1, kPad1);
  V phases[4];
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s) {
      const PadSpec corner{r == 0 ? 1 : 0, r == 1 ? 1 : 0, s == 0 ? 1 : 0,
                           s == 1 ? 1 : 0};
      phases[2 * r + s] = add(conv2d(ce, p.generator, 2, corner), dec);
    }
  return interleave_phases(phases[0], phases[1], phases[2], phases[3]);
}

template <typename V>
V semishift_l2h(const V& x_en, const V& x_de, const SemiShiftParams<V>& p) {
  check_semishift(x_en, x_de, p);
  const V ce = conv2d(x_en, p.compressor_en.weight, nullptr, 1, PadSpec{});
  const V cd = conv2d(x_de, p.compressor_de, 1, PadSpec{});
  const V en = conv2d(ce, p.generator, 1, kPad1);
  const V de = conv2d(cd, p.generator.weight, nullptr, 1, kPad1);
  return add(en, interp_nearest_x2(de));
}

template <typename V>
V semishift_lite(const V& x_en, const V& x_de, const SemiShiftParams<V>& p) {
  check_semishift(x_en, x_de, p);
  const Shape& g = p.generator.weight.shape();
  if (g.c != 1 || g.n != p.compressor_en.weight.shape().n)
    throw ShapeError("semishift_lite: generator must be depthwise (K*K, 1, 3, 3)");
  const V ce = conv2d(x_en, p.compressor_en.weight, nullptr, 1, PadSpec{});
  const V cd = conv2d(x_de, p.compressor_de, 1, PadSpec{});
  const V en = conv2d_depthwise(ce, p.generator.weight, p.generator.bias_ptr(), 1, kPad1);
  const V de = conv2d_depthwise(cd, p.generator.weight, nullptr, 1, kPad1);
  return add(en, interp_nearest_x2(de));
}

template <typename V>
V naive_kernelgen(const V& x_en, const V& x_de, const TwoStageParams<V>& p) {
  check_pair(x_en.shape(), x_de.shape());
  const V cat = concat_channels(x_en, interp_nearest_x2(x_de));
  check_in_channels(cat.shape(), p.compressor.weight.shape(), "naive compressor");
  kernel_side(p.generator.weight.shape().n);
  return conv2d(conv2d(cat, p.compressor, 1, PadSpec{}), p.generator, 1, kPad1);
}

template <typename V>
V carafe_kernelgen(const V& x_de, const TwoStageParams<V>& p) {
  check_in_channels(x_de.shape(), p.compressor.weight.shape(), "CARAFE compressor");
  if (p.generator.weight.shape().n % 4)
    throw ShapeError("CARAFE content encoder must output 4*K*K channels");
  kernel_side(p.generator.weight.shape().n / 4);
  return pixel_shuffle_x2(
      conv2d(conv2d(x_de, p.compressor, 1, PadSpec{}), p.generator, 1, kPad1));
}

template <typename V>
V encoder_only_kernelgen(const V& x_en, const TwoStageParams<V>& p) {
  check_in_channels(x_en.shape(), p.compressor.weight.shape(), "encoder compressor");
  kernel_side(p.generator.weight.shape().n);
  return conv2d(conv2d(x_en, p.compressor, 1, PadSpec{}), p.generator, 1, kPad1);
}

template <typename V>
V align_channels(const V& x_en, const ConvParams<V>& adapter) {
  check_in_channels(x_en.shape(), adapter.weight.shape(), "channel adapter");
  return conv1x1(x_en, adapter.weight, adapter.bias_ptr());
}

template <typename T>
KernelMap<T> normalize_kernels(const Tensor<T>& raw) {
  kernel_side(raw.c());
  return {softmax_channel(raw), true};
}

template <typename T>
KernelMap<T> normalize_kernels(const KernelMap<T>& raw) {
  return normalize_kernels(raw.weights);
}

template <typename T>
Var<T> normalize_kernels(const Var<T>& raw) {
  kernel_side(raw.shape().c);
  return softmax_channel(raw);
}

#define FADE_INSTANTIATE_V(V)                                                 \
  template V semishift_h2l(const V&, const V&, const SemiShiftParams<V>&);    \
  template V semishift_l2h(const V&, const V&, const SemiShiftParams<V>&);    \
  template V semishift_lite(const V&, const V&, const SemiShiftParams<V>&);   \
  template V naive_kernelgen(const V&, const V&, const TwoStageParams<V>&);   \
  template V carafe_kernelgen(const V&, const TwoStageParams<V>&);            \
  template V encoder_only_kernelgen(const V&, const TwoStageParams<V>&);      \
  template V align_channels(const V&, const ConvParams<V>&);

#define FADE_INSTANTIATE_T(T)                                                 \
  template struct KernelMap<T>;                                               \
  template KernelMap<T> semishift_direct(const Tensor<T>&, const Tensor<T>&,  \
                                         const SemiShiftParams<Tensor<T>>&);  \
  template KernelMap<T> normalize_kernels(const Tensor<T>&);                  \
  template KernelMap<T> normalize_kernels(const KernelMap<T>&);               \
  template Var<T> normalize_kernels(const Var<T>&);                           \
  FADE_INSTANTIATE_V(Tensor<T>)                                               \
  FADE_INSTANTIATE_V(Var<T>)

FADE_INSTANTIATE_T(float)
FADE_INSTANTIATE_T(double)

}  // namespace fade
