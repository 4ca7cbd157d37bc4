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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fade/assemble.hpp"
#include "fade/autograd.hpp"
#include "fade/gate.hpp"
#include "fade/kernelgen.hpp"
#include "fade/tensor.hpp"
#include "fade/tensor_io.hpp"

namespace fade {

enum class Variant {
  fade,
  fade_lite,
  fade_g1,
  carafe,
  nearest,
  bilinear,
  b1_encoder_only,
  b2_decoder_only,
  b3_naive,
  b4_semishift_nogate,
  b5_semishift_skip,
  b6_full,
};

enum class Precision { f32, f64 };
enum class SemiShiftImpl { direct, h2l, l2h };

std::string_view to_string(Variant v);
std::string_view to_string(Precision p);
std::string_view to_string(SemiShiftImpl i);
/// Throws ConfigError on unknown names.
Variant parse_variant(std::string_view s);
Precision parse_precision(std::string_view s);
SemiShiftImpl parse_impl(std::string_view s);
std::span<const Variant> all_variants();

enum class KernelSource { none, encoder, decoder, naive, semishift, semishift_lite };
enum class Fusion { none, gated, fixed };

struct OperatorConfig {
  Variant variant = Variant::fade;
  int C = 256;
  /// Encoder channels; 0 means equal to C. Any other value adds a 1x1
  /// channel adapter on the encoder path.
  int C_en = 0;
  int d = 64;
  int K = 5;
  static constexpr int h = 3;
  std::uint64_t seed = 0;
  Precision precision = Precision::f32;
  SemiShiftImpl impl = SemiShiftImpl::l2h;
  /// Replace a learned gate with G = 1 (fade, fade_lite, b6 only).
  bool fixed_gate = false;
  bool align_corners = false;

  int encoder_channels() const { return C_en > 0 ? C_en : C; }
  bool has_adapter() const { return C_en > 0 && C_en != C; }
};

/// Throws ConfigError for non-positive sizes, even K, or a fixed_gate flag
/// on a variant without a gate.
void validate(const OperatorConfig& cfg);

KernelSource kernel_source(const OperatorConfig& cfg);
Fusion fusion_of(const OperatorConfig& cfg);
bool needs_encoder(Variant v);

enum class ParamRole {
  counted,  // terms of the closed-form parameter formulas
  extra,    // biases the formulas leave out
  adapter,  // channel alignment outside the formulas
};

/// Parameter slots of every variant. Unused slots stay empty.
///   adapter        (C, C_en, 1, 1) + bias
///   compressor_en  (d, C, 1, 1), no bias
///   compressor_de  (d, C, 1, 1) + bias
///   compressor     (d, 2C, 1, 1) + bias       naive concatenation
///   generator      (K*K, d, 3, 3) + bias      (4K*K outputs for CARAFE,
///                                              depthwise for Lite)
///   gate           (1, C, 1, 1) + bias
template <typename V>
struct UpsamplerWeights {
  std::optional<ConvParams<V>> adapter;
  std::optional<ConvParams<V>> compressor_en;
  std::optional<ConvParams<V>> compressor_de;
  std::optional<ConvParams<V>> compressor;
  std::optional<ConvParams<V>> generator;
  std::optional<ConvParams<V>> gate;
};

template <typename V>
struct ParamRef {
  std::string name;
  V* value;
  ParamRole role;
};

/// Flat view in the canonical order (also the initialization and
/// checkpoint order). Names look like "generator.weight".
template <typename V>
std::vector<ParamRef<V>> parameters(UpsamplerWeights<V>& w);
template <typename V>
std::vector<ParamRef<const V>> parameters(const UpsamplerWeights<V>& w);

template <typename T>
class UpsampleOperator {
 public:
  UpsampleOperator(OperatorConfig cfg, UpsamplerWeights<Tensor<T>> weights);

  const OperatorConfig& config() const { return cfg_; }
  UpsamplerWeights<Tensor<T>>& weights() { return w_; }
  const UpsamplerWeights<Tensor<T>>& weights() const { return w_; }

  /// x_en may be null for decoder-only and fixed interpolation variants.
  Tensor<T> forward(const Tensor<T>* x_en, const Tensor<T>& x_de) const;

  /// Parameters as tape leaves, in canonical order.
  UpsamplerWeights<Var<T>> bind(Tape<T>& tape, bool requires_grad = true) const;

  /// Taped forward with previously bound parameters. The direct semi-shift
  /// form is not differentiable and is rejected.
  Var<T> forward(const Var<T>* x_en, const Var<T>& x_de,
                 const UpsamplerWeights<Var<T>>& bound) const;

  /// Kernel map the dynamic variants reassemble with (normalized);
  /// throws ConfigError for nearest/bilinear.
  KernelMap<T> kernels(const Tensor<T>* x_en, const Tensor<T>& x_de) const;

  /// Gate map of gated variants, the constant 1 map for fixed gates.
  /// Throws ConfigError for variants without fusion.
  GateMap<T> gate_map(const Tensor<T>& x_de) const;

  std::size_t parameter_count() const;

 private:
  OperatorConfig cfg_;
  UpsamplerWeights<Tensor<T>> w_;
};

/// Shapes every parameter for cfg and draws weights U(+-sqrt(6/fan_in))
/// from Rng(cfg.seed) in canonical order; biases start at zero. The stored
/// config's precision is set to match T.
template <typename T>
UpsampleOperator<T> build_operator(OperatorConfig cfg);

/// Chains x2 forwards; guides[i] feeds stage i and may be null where the
/// stage takes no encoder input.
template <typename T>
Tensor<T> compose_iterative(std::span<const UpsampleOperator<T>> ops,
                            std::span<const Tensor<T>* const> guides,
                            const Tensor<T>& x_de);

// Checkpoint container "FCKP" v1, little-endian:
//   "FCKP" | u32 version = 1 | u32 count
//   count x { u32 name_len | name bytes | u32 n, c, h, w | u64 offset }
//   FTEN blobs at the given absolute offsets, in manifest order.

struct NamedTensor {
  std::string name;
  AnyTensor tensor;
};

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<NamedTensor>& entries);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

template <typename T>
void save_weights(const std::filesystem::path& path, const UpsampleOperator<T>& op);
/// Names and shapes must match the operator exactly; dtypes are converted.
template <typename T>
void load_weights(const std::filesystem::path& path, UpsampleOperator<T>& op);

}  // namespace fade
