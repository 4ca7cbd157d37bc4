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

#include "fade/autograd.hpp"
#include "fade/tensor.hpp"

namespace fade {

/// Per-output-position upsampling kernels, shape (n, K*K, 2H, 2W).
/// Channel m indexes the K x K window row-major: m = wy * K + wx with
/// offsets wy - K/2 and wx - K/2 relative to the anchor.
template <typename T>
struct KernelMap {
  Tensor<T> weights;
  bool normalized = false;

  int K() const;
};

/// Kernel side length from a K*K channel count; throws unless K is odd.
int kernel_side(int channels);

/// Semi-shift generator parameters.
///   compressor_en: (d, C, 1, 1), no bias
///   compressor_de: (d, C, 1, 1), bias a of length d
///   generator:     (K*K, d, 3, 3), bias b of length K*K
/// The Lite variant uses d = K*K and a depthwise generator (K*K, 1, 3, 3).
template <typename V>
struct SemiShiftParams {
  ConvParams<V> compressor_en;
  ConvParams<V> compressor_de;
  ConvParams<V> generator;
};

/// A 1x1 compressor followed by a 3x3 generator (CARAFE, encoder-only and
/// the naive concatenation pipeline).
template <typename V>
struct TwoStageParams {
  ConvParams<V> compressor;
  ConvParams<V> generator;
};

/// Reference semi-shift convolution: every output window evaluated with
/// explicit loops. High-res position (i, j) sees the encoder 3x3 window
/// centered at (i, j) and the decoder 3x3 window centered at
/// (i / 2, j / 2); the generator bias is added once.
template <typename T>
KernelMap<T> semishift_direct(const Tensor<T>& x_en, const Tensor<T>& x_de,
                              const SemiShiftParams<Tensor<T>>& p);

// The remaining generators are written once for both plain tensors and
// taped Vars and return unnormalized (n, K*K, 2H, 2W) maps.

/// High-to-low form: four stride-2 sub-convolutions over the compressed
/// encoder, each padding only the two sides named by its corner, plus one
/// stride-1 decoder convolution shared by all four, interleaved back to
/// full resolution.
template <typename V>
V semishift_h2l(const V& x_en, const V& x_de, const SemiShiftParams<V>& p);

/// Low-to-high form: stride-1 convolution on the compressed encoder plus
/// the nearest-neighbour expansion of the decoder branch output.
template <typename V>
V semishift_l2h(const V& x_en, const V& x_de, const SemiShiftParams<V>& p);

/// Depthwise generator variant (low-to-high composition).
template <typename V>
V semishift_lite(const V& x_en, const V& x_de, const SemiShiftParams<V>& p);

/// concat(x_en, nearest(x_de)) -> 1x1 -> 3x3. The compressor input
/// channels are ordered encoder first.
template <typename V>
V naive_kernelgen(const V& x_en, const V& x_de, const TwoStageParams<V>& p);

/// Decoder-only: 1x1 -> 3x3 to 4*K*K channels at low resolution, then
/// pixel shuffle to (K*K, 2H, 2W).
template <typename V>
V carafe_kernelgen(const V& x_de, const TwoStageParams<V>& p);

/// Encoder-only: 1x1 -> 3x3 at high resolution.
template <typename V>
V encoder_only_kernelgen(const V& x_en, const TwoStageParams<V>& p);

/// 1x1 adapter mapping encoder channels onto the decoder channel count.
template <typename V>
V align_channels(const V& x_en, const ConvParams<V>& adapter);

/// Softmax over the K*K axis at every position.
template <typename T>
KernelMap<T> normalize_kernels(const Tensor<T>& raw);
template <typename T>
KernelMap<T> normalize_kernels(const KernelMap<T>& raw);
template <typename T>
Var<T> normalize_kernels(const Var<T>& raw);

/// Unnormalized wrapper, mainly for serialization and tests.
template <typename T>
KernelMap<T> as_kernel_map(Tensor<T> raw) {
  return KernelMap<T>{std::move(raw), false};
}

}  // namespace fade
