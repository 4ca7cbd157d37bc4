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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "fade/error.hpp"

namespace fade {

/// Dimensions of a rank-4 NCHW array. Convolution weights reuse the same
/// container with (out_channels, in_channels, k, k).
struct Shape {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  std::size_t numel() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Row-major n->c->h->w real array. All dims are >= 1.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0));
  Tensor(Shape shape, std::vector<T> data);

  static Tensor zeros(Shape shape) { return Tensor(shape); }
  static Tensor full(Shape shape, T v) { return Tensor(shape, v); }

  const Shape& shape() const { return shape_; }
  int n() const { return shape_.n; }
  int c() const { return shape_.c; }
  int h() const { return shape_.h; }
  int w() const { return shape_.w; }
  std::size_t numel() const { return data_.size(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  T* ptr() { return data_.data(); }
  const T* ptr() const { return data_.data(); }

  std::size_t offset(int n, int c, int y, int x) const {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + y) *
               shape_.w + x;
  }
  T& at(int n, int c, int y, int x) { return data_[offset(n, c, y, x)]; }
  T at(int n, int c, int y, int x) const { return data_[offset(n, c, y, x)]; }

  /// Pointer to the start of plane (n, c).
  T* plane(int n, int c) { return data_.data() + offset(n, c, 0, 0); }
  const T* plane(int n, int c) const { return data_.data() + offset(n, c, 0, 0); }

  T& operator[](std::size_t i) { return data_[i]; }
  T operator[](std::size_t i) const { return data_[i]; }

  bool all_finite() const;

 private:
  Shape shape_{};
  std::vector<T> data_ = std::vector<T>(1, T(0));
};

template <typename T>
bool operator==(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) return false;
  for (std::size_t i = 0; i < a.numel(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

/// Independent zero-fill pads per side.
struct PadSpec {
  int top = 0;
  int bottom = 0;
  int left = 0;
  int right = 0;

  static PadSpec uniform(int p) { return {p, p, p, p}; }
  bool operator==(const PadSpec&) const = default;
};

/// Weight plus optional bias. Bias has shape (1, out, 1, 1).
template <typename V>
struct ConvParams {
  V weight;
  std::optional<V> bias;

  const V* bias_ptr() const { return bias ? &*bias : nullptr; }
};

template <typename T>
using ConvWeights = ConvParams<Tensor<T>>;

// Primitive operators. All are pure; reductions within an output element
// run in a fixed order so results are bit-stable across runs.

/// Cross-correlation with zero padding. weight: (out, in, k, k), k odd or
/// even, bias: (1, out, 1, 1) or null.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weight,
                 const std::type_identity_t<Tensor<T>>* bias, int stride, PadSpec pad);

/// Also serves autograd Vars: the inner call resolves by argument lookup.
template <typename V>
V conv2d(const V& x, const ConvParams<V>& p, int stride, PadSpec pad) {
  return conv2d(x, p.weight, p.bias_ptr(), stride, pad);
}

/// One k x k kernel per channel. weight: (C, 1, k, k).
template <typename T>
Tensor<T> conv2d_depthwise(const Tensor<T>& x, const Tensor<T>& weight,
                           const std::type_identity_t<Tensor<T>>* bias, int stride, PadSpec pad);

/// Per-pixel channel mixing. weight: (out, in, 1, 1).
template <typename T>
Tensor<T> conv1x1(const Tensor<T>& x, const Tensor<T>& weight,
                  const std::type_identity_t<Tensor<T>>* bias);

template <typename T>
Tensor<T> interp_nearest_x2(const Tensor<T>& x);

/// Half-pixel centers when align_corners is false.
template <typename T>
Tensor<T> interp_bilinear_x2(const Tensor<T>& x, bool align_corners = false);

template <typename T>
Tensor<T> maxpool2x2(const Tensor<T>& x);

template <typename T>
Tensor<T> softmax_channel(const Tensor<T>& x);

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x);

template <typename T>
Tensor<T> relu(const Tensor<T>& x);

/// (n, c, h, w) -> (n, c/4, 2h, 2w);
/// out(co, 2y+r, 2x+s) = in(4co + 2r + s, y, x).
template <typename T>
Tensor<T> pixel_shuffle_x2(const Tensor<T>& x);

/// Inverse of pixel_shuffle_x2.
template <typename T>
Tensor<T> pixel_unshuffle_x2(const Tensor<T>& x);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s);

/// Concatenate along the channel axis.
template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

/// Keep every second row/column starting at (0, 0).
template <typename T>
Tensor<T> subsample_x2(const Tensor<T>& x);

/// Interleave four (n, c, h, w) phase maps into (n, c, 2h, 2w):
/// phase p = 2r + s fills output positions (2y + r, 2x + s).
template <typename T>
Tensor<T> interleave_phases(const Tensor<T>& p00, const Tensor<T>& p01,
                            const Tensor<T>& p10, const Tensor<T>& p11);

/// Extract phase (r, s) of a (n, c, 2h, 2w) map.
template <typename T>
Tensor<T> extract_phase(const Tensor<T>& x, int r, int s);

/// Select batch entries in the given order.
template <typename T>
Tensor<T> gather_batch(const Tensor<T>& x, std::span<const int> order);

template <typename T>
Tensor<T> slice_batch(const Tensor<T>& x, int begin, int count);

template <typename T>
T max_abs_diff(const Tensor<T>& a, const Tensor<T>& b);

/// max_i |a_i - b_i| / max(1, |a_i|, |b_i|)
template <typename T>
double max_rel_diff(const Tensor<T>& a, const Tensor<T>& b);

template <typename T, typename U>
Tensor<U> cast(const Tensor<T>& x) {
  Tensor<U> out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = static_cast<U>(x[i]);
  return out;
}

}  // namespace fade
