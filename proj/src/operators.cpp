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

#include "fade/operators.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "fade/random.hpp"

namespace fade {

namespace {

constexpr std::array kVariantNames = {
    std::pair{Variant::fade, "fade"},
    std::pair{Variant::fade_lite, "fade_lite"},
    std::pair{Variant::fade_g1, "fade_g1"},
    std::pair{Variant::carafe, "carafe"},
    std::pair{Variant::nearest, "nearest"},
    std::pair{Variant::bilinear, "bilinear"},
    std::pair{Variant::b1_encoder_only, "b1_encoder_only"},
    std::pair{Variant::b2_decoder_only, "b2_decoder_only"},
    std::pair{Variant::b3_naive, "b3_naive"},
    std::pair{Variant::b4_semishift_nogate, "b4_semishift_nogate"},
    std::pair{Variant::b5_semishift_skip, "b5_semishift_skip"},
    std::pair{Variant::b6_full, "b6_full"},
};

constexpr std::array kAllVariants = [] {
  std::array<Variant, kVariantNames.size()> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = kVariantNames[i].first;
  return out;
}();

template <typename V>
struct is_var : std::false_type {};
template <typename T>
struct is_var<Var<T>> : std::true_type {};

template <typename V>
void check_inputs(const OperatorConfig& cfg, const V* x_en, const V& x_de) {
  const Shape& de = x_de.shape();
  if (de.c != cfg.C)
    throw ShapeError("decoder has " + std::to_string(de.c) + " channels, operator expects " +
                     std::to_string(cfg.C));
  if (x_en) {
    const Shape& en = x_en->shape();
    if (en.n != de.n || en.h != 2 * de.h || en.w != 2 * de.w)
      throw ShapeError("encoder guide " + en.str() + " is not at twice the decoder resolution " +
                       de.str());
    if (en.c != cfg.encoder_channels())
      throw ShapeError("encoder guide has " + std::to_string(en.c) +
                       " channels, operator expects " + std::to_string(cfg.encoder_channels()));
  } else if (needs_encoder(cfg.variant)) {
    throw ConfigError("variant " + std::string(to_string(cfg.variant)) +
                      " requires an encoder guide (--encoder)");
  }
}

template <typename V>
V raw_kernels(const OperatorConfig& cfg, const UpsamplerWeights<V>& w, const V* en,
              const V& de) {
  switch (kernel_source(cfg)) {
    case KernelSource::encoder:
      return encoder_only_kernelgen(*en, TwoStageParams<V>{*w.compressor_en, *w.generator});
    case KernelSource::decoder:
      return carafe_kernelgen(de, TwoStageParams<V>{*w.compressor_de, *w.generator});
    case KernelSource::naive:
      return naive_kernelgen(*en, de, TwoStageParams<V>{*w.compressor, *w.generator});
    case KernelSource::semishift_lite:
      return semishift_lite(*en, de,
                            SemiShiftParams<V>{*w.compressor_en, *w.compressor_de, *w.generator});
    case KernelSource::semishift: {
      const SemiShiftParams<V> p{*w.compressor_en, *w.compressor_de, *w.generator};
      switch (cfg.impl) {
        case SemiShiftImpl::direct:
          if constexpr (is_var<V>::value)
            throw ConfigError("the direct semi-shift form is a test oracle and has no gradient");
          else
            return semishift_direct(*en, de, p).weights;
        case SemiShiftImpl::h2l:
          return semishift_h2l(*en, de, p);
        case SemiShiftImpl::l2h:
          return semishift_l2h(*en, de, p);
      }
      break;
    }
    case KernelSource::none:
      break;
  }
  throw ConfigError("variant " + std::string(to_string(cfg.variant)) + " has no kernel generator");
}

template <typename V>
V run_pipeline(const OperatorConfig& cfg, const UpsamplerWeights<V>& w, const V* x_en,
               const V& x_de) {
  check_inputs(cfg, x_en, x_de);
  if (cfg.variant == Variant::nearest) return upsample_nearest(x_de);
  if (cfg.variant == Variant::bilinear) return upsample_bilinear(x_de, cfg.align_corners);

  std::optional<V> aligned;
  if (x_en && w.adapter) aligned = align_channels(*x_en, *w.adapter);
  const V* en = aligned ? &*aligned : x_en;
  // G = 1 discards the upsampled branch entirely.
  if (fusion_of(cfg) == Fusion::fixed) return *en;

  const V up = reassemble(x_de, normalize_kernels(raw_kernels(cfg, w, en, x_de)),
                          ReassemblySpec{cfg.K});
  if (fusion_of(cfg) == Fusion::gated) return fuse_gated(*en, up, generate_gate(x_de, *w.gate));
  return up;
}

template <typename V, typename W>
std::vector<ParamRef<V>> collect(W& w) {
  std::vector<ParamRef<V>> out;
  auto add = [&](const char* slot, auto& p, ParamRole weight_role, ParamRole bias_role) {
    if (!p) return;
    out.push_back({std::string(slot) + ".weight", &p->weight, weight_role});
    if (p->bias) out.push_back({std::string(slot) + ".bias", &*p->bias, bias_role});
  };
  add("adapter", w.adapter, ParamRole::adapter, ParamRole::adapter);
  add("compressor_en", w.compressor_en, ParamRole::counted, ParamRole::extra);
  add("compressor_de", w.compressor_de, ParamRole::counted, ParamRole::extra);
  add("compressor", w.compressor, ParamRole::counted, ParamRole::extra);
  add("generator", w.generator, ParamRole::counted, ParamRole::extra);
  add("gate", w.gate, ParamRole::counted, ParamRole::extra);
  return out;
}

template <typename T>
ConvWeights<T> make_conv(int out, int in, int k, bool bias) {
  ConvWeights<T> p{Tensor<T>({out, in, k, k}), std::nullopt};
  if (bias) p.bias = Tensor<T>({1, out, 1, 1});
  return p;
}

template <typename T>
Precision precision_of() {
  return std::is_same_v<T, float> ? Precision::f32 : Precision::f64;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  put_u32(os, static_cast<std::uint32_t>(v));
  put_u32(os, static_cast<std::uint32_t>(v >> 32));
}

std::uint64_t get_le(std::istream& is, int bytes) {
  unsigned char b[8] = {};
  if (!is.read(reinterpret_cast<char*>(b), bytes)) throw FormatError("checkpoint header truncated");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

const Shape& shape_of(const AnyTensor& t) {
  return std::visit([](const auto& x) -> const Shape& { return x.shape(); }, t);
}

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& [k, name] : kVariantNames)
    if (k == v) return name;
  return "unknown";
}

std::string_view to_string(Precision p) { return p == Precision::f32 ? "f32" : "f64"; }

std::string_view to_string(SemiShiftImpl i) {
  switch (i) {
    case SemiShiftImpl::direct: return "direct";
    case SemiShiftImpl::h2l: return "h2l";
    case SemiShiftImpl::l2h: return "l2h";
  }
  return "unknown";
}

Variant parse_variant(std::string_view s) {
  for (const auto& [k, name] : kVariantNames)
    if (s == name) return k;
  // Short ablation aliases.
  static constexpr std::array<std::pair<const char*, Variant>, 6> kShort = {{
      {"b1", Variant::b1_encoder_only},
      {"b2", Variant::b2_decoder_only},
      {"b3", Variant::b3_naive},
      {"b4", Variant::b4_semishift_nogate},
      {"b5", Variant::b5_semishift_skip},
      {"b6", Variant::b6_full},
  }};
  for (const auto& [name, k] : kShort)
    if (s == name) return k;
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

Precision parse_precision(std::string_view s) {
  if (s == "f32") return Precision::f32;
  if (s == "f64") return Precision::f64;
  throw ConfigError("unknown precision '" + std::string(s) + "' (f32 or f64)");
}

SemiShiftImpl parse_impl(std::string_view s) {
  if (s == "direct") return SemiShiftImpl::direct;
  if (s == "h2l") return SemiShiftImpl::h2l;
  if (s == "l2h") return SemiShiftImpl::l2h;
  throw ConfigError("unknown implementation '" + std::string(s) + "' (direct, h2l, l2h)");
}

std::span<const Variant> all_variants() { return kAllVariants; }

bool needs_encoder(Variant v) {
  switch (v) {
    case Variant::nearest:
    case Variant::bilinear:
    case Variant::carafe:
    case Variant::b2_decoder_only:
      return false;
    default:
      return true;
  }
}

KernelSource kernel_source(const OperatorConfig& cfg) {
  switch (cfg.variant) {
    case Variant::nearest:
    case Variant::bilinear:
      return KernelSource::none;
    case Variant::carafe:
    case Variant::b2_decoder_only:
      return KernelSource::decoder;
    case Variant::b1_encoder_only:
      return KernelSource::encoder;
    case Variant::b3_naive:
      return KernelSource::naive;
    case Variant::fade_lite:
      return KernelSource::semishift_lite;
    default:
      return KernelSource::semishift;
  }
}

Fusion fusion_of(const OperatorConfig& cfg) {
  switch (cfg.variant) {
    case Variant::fade:
    case Variant::fade_lite:
    case Variant::b6_full:
      return cfg.fixed_gate ? Fusion::fixed : Fusion::gated;
    case Variant::fade_g1:
    case Variant::b5_semishift_skip:
      return Fusion::fixed;
    default:
      return Fusion::none;
  }
}

void validate(const OperatorConfig& cfg) {
  auto positive = [](int v, const char* what) {
    if (v <= 0) throw ConfigError(std::string(what) + " must be positive, got " + std::to_string(v));
  };
  positive(cfg.C, "C");
  positive(cfg.d, "d");
  positive(cfg.K, "K");
  if (cfg.C_en < 0) throw ConfigError("C_en must be non-negative");
  if (cfg.K % 2 == 0) throw ConfigError("K must be odd, got " + std::to_string(cfg.K));
  if (cfg.fixed_gate && fusion_of(cfg) == Fusion::none)
    throw ConfigError("fixed_gate applies only to gated variants, not " +
                      std::string(to_string(cfg.variant)));
  if (cfg.has_adapter() && !needs_encoder(cfg.variant))
    throw ConfigError("C_en is meaningless for " + std::string(to_string(cfg.variant)) +
                      ", which takes no encoder input");
}

template <typename V>
std::vector<ParamRef<V>> parameters(UpsamplerWeights<V>& w) {
  return collect<V>(w);
}

template <typename V>
std::vector<ParamRef<const V>> parameters(const UpsamplerWeights<V>& w) {
  return collect<const V>(w);
}

template <typename T>
UpsampleOperator<T>::UpsampleOperator(OperatorConfig cfg, UpsamplerWeights<Tensor<T>> weights)
    : cfg_(cfg), w_(std::move(weights)) {
  validate(cfg_);
}

template <typename T>
Tensor<T> UpsampleOperator<T>::forward(const Tensor<T>* x_en, const Tensor<T>& x_de) const {
  return run_pipeline(cfg_, w_, x_en, x_de);
}

template <typename T>
UpsamplerWeights<Var<T>> UpsampleOperator<T>::bind(Tape<T>& tape, bool requires_grad) const {
  UpsamplerWeights<Var<T>> out;
  auto bind_slot = [&](const std::optional<ConvWeights<T>>& src,
                       std::optional<ConvParams<Var<T>>>& dst) {
    if (!src) return;
    ConvParams<Var<T>> p{tape.leaf(src->weight, requires_grad), std::nullopt};
    if (src->bias) p.bias = tape.leaf(*src->bias, requires_grad);
    dst = std::move(p);
  };
  bind_slot(w_.adapter, out.adapter);
  bind_slot(w_.compressor_en, out.compressor_en);
  bind_slot(w_.compressor_de, out.compressor_de);
  bind_slot(w_.compressor, out.compressor);
  bind_slot(w_.generator, out.generator);
  bind_slot(w_.gate, out.gate);
  return out;
}

template <typename T>
Var<T> UpsampleOperator<T>::forward(const Var<T>* x_en, const Var<T>& x_de,
                                    const UpsamplerWeights<Var<T>>& bound) const {
  return run_pipeline(cfg_, bound, x_en, x_de);
}

template <typename T>
KernelMap<T> UpsampleOperator<T>::kernels(const Tensor<T>* x_en, const Tensor<T>& x_de) const {
  check_inputs(cfg_, x_en, x_de);
  if (kernel_source(cfg_) == KernelSource::none)
    throw ConfigError("variant " + std::string(to_string(cfg_.variant)) + " has no kernel map");
  std::optional<Tensor<T>> aligned;
  if (x_en && w_.adapter) aligned = align_channels(*x_en, *w_.adapter);
  return normalize_kernels(raw_kernels(cfg_, w_, aligned ? &*aligned : x_en, x_de));
}

template <typename T>
GateMap<T> UpsampleOperator<T>::gate_map(const Tensor<T>& x_de) const {
  switch (fusion_of(cfg_)) {
    case Fusion::gated:
      return generate_gate(x_de, *w_.gate);
    case Fusion::fixed:
      return fixed_gate<T>({x_de.n(), x_de.c(), 2 * x_de.h(), 2 * x_de.w()});
    case Fusion::none:
      break;
  }
  throw ConfigError("variant " + std::string(to_string(cfg_.variant)) + " has no gate");
}

template <typename T>
std::size_t UpsampleOperator<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters(w_)) n += p.value->numel();
  return n;
}

template <typename T>
UpsampleOperator<T> build_operator(OperatorConfig cfg) {
  validate(cfg);
  cfg.precision = precision_of<T>();
  const int C = cfg.C, d = cfg.d, KK = cfg.K * cfg.K;
  UpsamplerWeights<Tensor<T>> w;
  if (cfg.has_adapter()) w.adapter = make_conv<T>(C, cfg.C_en, 1, true);
  switch (kernel_source(cfg)) {
    case KernelSource::none:
      break;
    case KernelSource::encoder:
      w.compressor_en = make_conv<T>(d, C, 1, false);
      w.generator = make_conv<T>(KK, d, 3, true);
      break;
    case KernelSource::decoder:
      w.compressor_de = make_conv<T>(d, C, 1, true);
      w.generator = make_conv<T>(4 * KK, d, 3, true);
      break;
    case KernelSource::naive:
      w.compressor = make_conv<T>(d, 2 * C, 1, true);
      w.generator = make_conv<T>(KK, d, 3, true);
      break;
    case KernelSource::semishift:
      w.compressor_en = make_conv<T>(d, C, 1, false);
      w.compressor_de = make_conv<T>(d, C, 1, true);
      w.generator = make_conv<T>(KK, d, 3, true);
      break;
    case KernelSource::semishift_lite:
      w.compressor_en = make_conv<T>(KK, C, 1, false);
      w.compressor_de = make_conv<T>(KK, C, 1, true);
      w.generator = make_conv<T>(KK, 1, 3, true);
      break;
  }
  if (fusion_of(cfg) == Fusion::gated) w.gate = make_conv<T>(1, C, 1, true);

  Rng rng(cfg.seed);
  for (auto& p : parameters(w)) {
    if (p.name.ends_with(".bias")) continue;
    const Shape& s = p.value->shape();
    init_uniform_fan_in(*p.value, s.c * s.h * s.w, rng);
  }
  return UpsampleOperator<T>(cfg, std::move(w));
}

template <typename T>
Tensor<T> compose_iterative(std::span<const UpsampleOperator<T>> ops,
                            std::span<const Tensor<T>* const> guides, const Tensor<T>& x_de) {
  if (ops.empty()) throw ConfigError("compose_iterative needs at least one stage");
  if (guides.size() != ops.size())
    throw ConfigError("compose_iterative: " + std::to_string(ops.size()) + " stages but " +
                      std::to_string(guides.size()) + " guides");
  Tensor<T> x = x_de;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    try {
      x = ops[i].forward(guides[i], x);
    } catch (const ShapeError& e) {
      throw ShapeError("stage " + std::to_string(i) + ": " + e.what());
    }
  }
  return x;
}

void write_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& entries) {
  std::uint64_t offset = 12;
  for (const auto& e : entries) offset += 4 + e.name.size() + 16 + 8;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os.write("FCKP", 4);
  put_u32(os, 1);
  put_u32(os, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    put_u32(os, static_cast<std::uint32_t>(e.name.size()));
    os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    const Shape& s = shape_of(e.tensor);
    for (int v : {s.n, s.c, s.h, s.w}) put_u32(os, static_cast<std::uint32_t>(v));
    put_u64(os, offset);
    const DType dt = std::holds_alternative<Tensor<float>>(e.tensor) ? DType::f32 : DType::f64;
    offset += ften_size_bytes(s, dt);
  }
  for (const auto& e : entries) std::visit([&](const auto& t) { write_ften(os, t); }, e.tensor);
  if (!os) throw FormatError("write failed: " + path.string());
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "FCKP", 4) != 0)
    throw FormatError(path.string() + ": not a checkpoint (bad magic)");
  if (get_le(is, 4) != 1) throw FormatError(path.string() + ": unsupported checkpoint version");
  const std::uint64_t count = get_le(is, 4);
  struct Entry {
    std::string name;
    Shape shape;
    std::uint64_t offset;
  };
  std::vector<Entry> manifest;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t len = get_le(is, 4);
    if (len > 4096) throw FormatError(path.string() + ": implausible entry name length");
    std::string name(len, '\0');
    if (!is.read(name.data(), static_cast<std::streamsize>(len)))
      throw FormatError("checkpoint header truncated");
    Shape s;
    s.n = static_cast<int>(get_le(is, 4));
    s.c = static_cast<int>(get_le(is, 4));
    s.h = static_cast<int>(get_le(is, 4));
    s.w = static_cast<int>(get_le(is, 4));
    manifest.push_back({std::move(name), s, get_le(is, 8)});
  }
  std::vector<NamedTensor> out;
  for (const auto& e : manifest) {
    is.clear();
    is.seekg(static_cast<std::streamoff>(e.offset));
    if (!is) throw FormatError(path.string() + ": bad offset for " + e.name);
    AnyTensor t = read_ften(is);
    if (shape_of(t) != e.shape)
      throw FormatError(path.string() + ": " + e.name + " stored as " + shape_of(t).str() +
                        " but listed as " + e.shape.str());
    out.push_back({e.name, std::move(t)});
  }
  return out;
}

template <typename T>
void save_weights(const std::filesystem::path& path, const UpsampleOperator<T>& op) {
  std::vector<NamedTensor> entries;
  for (const auto& p : parameters(op.weights())) entries.push_back({p.name, *p.value});
  write_checkpoint(path, entries);
}

template <typename T>
void load_weights(const std::filesystem::path& path, UpsampleOperator<T>& op) {
  auto entries = read_checkpoint(path);
  auto params = parameters(op.weights());
  if (entries.size() != params.size())
    throw ShapeError(path.string() + ": " + std::to_string(entries.size()) +
                     " tensors, operator has " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (entries[i].name != params[i].name)
      throw ShapeError(path.string() + ": entry " + std::to_string(i) + " is '" +
                       entries[i].name + "', expected '" + params[i].name + "'");
    Tensor<T> t = std::visit([](const auto& x) { return cast<typename std::decay_t<decltype(x)>::value_type, T>(x); },
                             entries[i].tensor);
    if (t.shape() != params[i].value->shape())
      throw ShapeError(params[i].name + ": checkpoint " + t.shape().str() + " vs operator " +
                       params[i].value->shape().str());
    *params[i].value = std::move(t);
  }
}

#define FADE_INSTANTIATE(T)                                                                  \
  template std::vector<ParamRef<Tensor<T>>> parameters(UpsamplerWeights<Tensor<T>>&);        \
  template std::vector<ParamRef<const Tensor<T>>> parameters(                               \
      const UpsamplerWeights<Tensor<T>>&);                                                   \
  template std::vector<ParamRef<Var<T>>> parameters(UpsamplerWeights<Var<T>>&);              \
  template std::vector<ParamRef<const Var<T>>> parameters(const UpsamplerWeights<Var<T>>&);  \
  template class UpsampleOperator<T>;                                                        \
  template UpsampleOperator<T> build_operator<T>(OperatorConfig);                            \
  template Tensor<T> compose_iterative(std::span<const UpsampleOperator<T>>,                 \
                                       std::span<const Tensor<T>* const>, const Tensor<T>&); \
  template void save_weights(const std::filesystem::path&, const UpsampleOperator<T>&);      \
  template void load_weights(const std::filesystem::path&, UpsampleOperator<T>&);

FADE_INSTANTIATE(float)
FADE_INSTANTIATE(double)

}  // namespace fade
