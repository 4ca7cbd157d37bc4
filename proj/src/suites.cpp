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

#include "fade/suites.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>

#include "fade/assemble.hpp"
#include "fade/costmodel.hpp"
#include "fade/gate.hpp"
#include "fade/gradcheck.hpp"
#include "fade/kernelgen.hpp"
#include "fade/operators.hpp"
#include "fade/random.hpp"

namespace fade {

namespace {

constexpr std::array<std::string_view, 4> kSuites = {"equivalence", "gradcheck", "identities", "cost"};

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

void check(SuiteResult& r, bool ok, std::string line) {
  r.passed = r.passed && ok;
  r.lines.push_back((ok ? "ok    " : "FAIL  ") + line);
}

template <typename T>
double triangle(std::uint64_t seed) {
  Rng rng(seed);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.below(hi - lo + 1)); };
  const int N = pick(1, 2), C = pick(1, 8), H = pick(1, 8), W = pick(1, 8), d = pick(1, 6);
  const int K = 2 * pick(0, 2) + 1, KK = K * K;
  const SemiShiftParams<Tensor<T>> p{{random_tensor<T>({d, C, 1, 1}, rng), std::nullopt},
                                     {random_tensor<T>({d, C, 1, 1}, rng), random_tensor<T>({1, d, 1, 1}, rng)},
                                     {random_tensor<T>({KK, d, 3, 3}, rng), random_tensor<T>({1, KK, 1, 1}, rng)}};
  const auto en = random_tensor<T>({N, C, 2 * H, 2 * W}, rng);
  const auto de = random_tensor<T>({N, C, H, W}, rng);
  const auto direct = semishift_direct(en, de, p).weights;
  const auto h2l = semishift_h2l(en, de, p);
  const auto l2h = semishift_l2h(en, de, p);
  return std::max({max_rel_diff(direct, h2l), max_rel_diff(direct, l2h), max_rel_diff(h2l, l2h)});
}

SuiteResult equivalence(int seeds) {
  SuiteResult r{"equivalence", true, {}};
  double f64 = 0.0, f32 = 0.0;
  for (int s = 0; s < seeds; ++s) {
    f64 = std::max(f64, triangle<double>(s));
    f32 = std::max(f32, triangle<float>(s));
  }
  check(r, f64 <= 1e-10, format("direct/h2l/l2h f64 over %d cases: max rel %.3e (<= 1e-10)", seeds, f64));
  check(r, f32 <= 1e-5, format("direct/h2l/l2h f32 over %d cases: max rel %.3e (<= 1e-5)", seeds, f32));
  return r;
}

using Vars = std::span<const Var<double>>;

struct NamedOp {
  const char* name;
  OpUnderTest op;
  std::vector<Shape> shapes;
};

std::vector<NamedOp> differentiable_ops() {
  using V = Var<double>;
  return {
      {"conv2d 3x3 pad 1", [](Tape<double>&, Vars v) { return conv2d(v[0], v[1], &v[2], 1, PadSpec::uniform(1)); },
       {{2, 3, 5, 4}, {4, 3, 3, 3}, {1, 4, 1, 1}}},
      {"conv2d stride 2 corner pad", [](Tape<double>&, Vars v) { return conv2d(v[0], v[1], &v[2], 2, PadSpec{1, 0, 0, 1}); },
       {{1, 2, 6, 5}, {3, 2, 3, 3}, {1, 3, 1, 1}}},
      {"conv2d depthwise", [](Tape<double>&, Vars v) { return conv2d_depthwise(v[0], v[1], &v[2], 1, PadSpec::uniform(1)); },
       {{1, 3, 4, 4}, {3, 1, 3, 3}, {1, 3, 1, 1}}},
      {"conv1x1", [](Tape<double>&, Vars v) { return conv1x1(v[0], v[1], &v[2]); },
       {{1, 4, 3, 3}, {2, 4, 1, 1}, {1, 2, 1, 1}}},
      {"nearest x2", [](Tape<double>&, Vars v) { return interp_nearest_x2(v[0]); }, {{1, 2, 3, 4}}},
      {"bilinear x2", [](Tape<double>&, Vars v) { return interp_bilinear_x2(v[0], false); }, {{1, 2, 3, 4}}},
      {"bilinear x2 align corners", [](Tape<double>&, Vars v) { return interp_bilinear_x2(v[0], true); }, {{1, 2, 3, 4}}},
      {"sigmoid", [](Tape<double>&, Vars v) { return sigmoid(v[0]); }, {{1, 2, 3, 3}}},
      {"softmax", [](Tape<double>&, Vars v) { return softmax_channel(v[0]); }, {{1, 9, 3, 2}}},
      {"pixel shuffle", [](Tape<double>&, Vars v) { return pixel_shuffle_x2(v[0]); }, {{1, 8, 2, 3}}},
      {"concat", [](Tape<double>&, Vars v) { return concat_channels(v[0], v[1]); }, {{1, 2, 3, 3}, {1, 1, 3, 3}}},
      {"reassemble K=3",
       [](Tape<double>&, Vars v) { return reassemble(v[0], softmax_channel(v[1]), ReassemblySpec{3}); },
       {{1, 2, 3, 4}, {1, 9, 6, 8}}},
      {"gate", [](Tape<double>&, Vars v) { return generate_gate(v[0], ConvParams<V>{v[1], v[2]}); },
       {{1, 3, 2, 3}, {1, 3, 1, 1}, {1, 1, 1, 1}}},
      {"gated fusion", [](Tape<double>&, Vars v) { return fuse_gated(v[0], v[1], sigmoid(v[2])); },
       {{1, 3, 4, 4}, {1, 3, 4, 4}, {1, 1, 4, 4}}},
      {"maxpool 2x2", [](Tape<double>&, Vars v) { return maxpool2x2(v[0]); }, {{1, 2, 4, 6}}},
      {"relu", [](Tape<double>&, Vars v) { return relu(v[0]); }, {{1, 2, 3, 3}}},
      {"interleave phases", [](Tape<double>&, Vars v) { return interleave_phases(v[0], v[1], v[2], v[3]); },
       {{1, 2, 2, 3}, {1, 2, 2, 3}, {1, 2, 2, 3}, {1, 2, 2, 3}}},
      {"softmax cross-entropy",
       [](Tape<double>&, Vars v) {
         const int labels[] = {0, 2, 1, 1, 0, 2};
         return softmax_cross_entropy(v[0], std::span<const int>(labels));
       },
       {{1, 3, 2, 3}}},
      {"mse loss", [](Tape<double>&, Vars v) { return mse_loss(v[0], Tensor<double>(v[0].shape(), 0.25)); },
       {{1, 2, 3, 3}}},
  };
}

/// Full operator forward with every parameter (and nonzero biases) as a
/// gradcheck input.
double operator_gradcheck(const OperatorConfig& cfg, std::uint64_t seed) {
  const auto op = build_operator<double>(cfg);
  Rng rng(seed);
  std::vector<Tensor<double>> inputs = {random_tensor<double>({1, cfg.encoder_channels(), 4, 4}, rng),
                                        random_tensor<double>({1, cfg.C, 2, 2}, rng)};
  for (const auto& p : parameters(op.weights()))
    inputs.push_back(p.name.ends_with(".bias") ? random_tensor<double>(p.value->shape(), rng, -0.5, 0.5)
                                               : *p.value);
  const auto fn = [&](Tape<double>& tape, Vars xs) {
    auto bound = op.bind(tape, false);
    auto refs = parameters(bound);
    for (std::size_t i = 0; i < refs.size(); ++i) *refs[i].value = xs[2 + i];
    return op.forward(&xs[0], xs[1], bound);
  };
  return gradcheck(fn, std::move(inputs), seed).max_rel_error;
}

SuiteResult gradcheck_suite(int seeds) {
  SuiteResult r{"gradcheck", true, {}};
  double worst_all = 0.0;
  for (const auto& op : differentiable_ops()) {
    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
      Rng rng(1000 + s);
      std::vector<Tensor<double>> inputs;
      for (const auto& shape : op.shapes) inputs.push_back(random_tensor<double>(shape, rng));
      worst = std::max(worst, gradcheck(op.op, std::move(inputs), s).max_rel_error);
    }
    worst_all = std::max(worst_all, worst);
    check(r, worst < 1e-6, format("%-28s max rel %.3e", op.name, worst));
  }
  for (Variant v : {Variant::fade, Variant::fade_lite, Variant::carafe, Variant::b1_encoder_only,
                    Variant::b3_naive, Variant::b4_semishift_nogate}) {
    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
      OperatorConfig cfg;
      cfg.variant = v;
      cfg.C = 3;
      cfg.d = 3;
      cfg.K = 3;
      cfg.seed = s;
      cfg.precision = Precision::f64;
      worst = std::max(worst, operator_gradcheck(cfg, 2000 + s));
    }
    worst_all = std::max(worst_all, worst);
    check(r, worst < 1e-6, format("%-28s max rel %.3e", (std::string(to_string(v)) + " forward").c_str(), worst));
  }
  r.lines.push_back(format("worst over %d seeds: %.3e (< 1e-6)", seeds, worst_all));
  return r;
}

SuiteResult identities(int seeds) {
  SuiteResult r{"identities", true, {}};
  bool nn = true, g1 = true, g0 = true, shift = true;
  double sum_err = 0.0;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(3000 + s);
    const int K = 1 + 2 * static_cast<int>(rng.below(4));
    const auto x = random_tensor<double>({2, 3, 3 + s % 3, 4}, rng);
    Tensor<double> onehot({2, K * K, 2 * x.h(), 2 * x.w()});
    for (int n = 0; n < 2; ++n)
      std::fill_n(onehot.plane(n, K * K / 2), onehot.shape().plane(), 1.0);
    nn = nn && reassemble(x, KernelMap<double>{onehot, true}, {K}) == interp_nearest_x2(x);

    const auto en = random_tensor<double>({2, 3, 4, 6}, rng);
    const auto up = random_tensor<double>({2, 3, 4, 6}, rng);
    g1 = g1 && fuse_gated(en, up, fixed_gate<double>(en.shape())) == en;
    g0 = g0 && fuse_gated(en, up, Tensor<double>({2, 1, 4, 6})) == up;

    const auto raw = random_tensor<double>({1, K * K, 4, 4}, rng, -5, 5);
    const auto k = normalize_kernels(raw);
    for (int q = 0; q < 16; ++q) {
      double t = 0.0;
      for (int m = 0; m < K * K; ++m) t += k.weights.plane(0, m)[q];
      sum_err = std::max(sum_err, std::abs(t - 1.0));
    }
    Tensor<double> shifted = raw;
    for (auto& v : shifted.data()) v += 3.5;
    shift = shift && max_abs_diff(softmax_channel(shifted), k.weights) <= 1e-12;
  }
  check(r, nn, "center one-hot kernels reassemble to nearest upsampling (bit-exact)");
  check(r, g1, "G = 1 fusion returns the encoder feature (bit-exact)");
  check(r, g0, "G = 0 fusion returns the upsampled feature (bit-exact)");
  check(r, sum_err <= 1e-6, format("normalized kernels sum to 1: max |sum - 1| %.3e (<= 1e-6)", sum_err));
  check(r, shift, "softmax invariant to a constant shift (<= 1e-12)");
  return r;
}

SuiteResult cost() {
  SuiteResult r{"cost", true, {}};
  struct Golden {
    CostRow row;
    const char* gflops;
    std::int64_t params;
    const char* rounded;
  };
  for (const auto& g : {Golden{CostRow::carafe, "2.50", 73984, "74K"}, Golden{CostRow::fade, "4.56", 47424, "47K"},
                        Golden{CostRow::fade_lite, "1.53", 13281, "13K"}}) {
    CostQuery q;
    q.row = g.row;
    const auto rep = flops_of(q);
    const std::string gf = format("%.2f", rep.gflops());
    const std::string k = format("%lldK", static_cast<long long>((rep.params + 500) / 1000));
    check(r, gf == g.gflops && rep.params == g.params && k == g.rounded,
          format("%-10s %s GFLOPs  %lld params (%s)", rep.row.c_str(), gf.c_str(),
                 static_cast<long long>(rep.params), k.c_str()));
  }
  return r;
}

}  // namespace

std::span<const std::string_view> suite_names() { return kSuites; }

SuiteResult run_suite(std::string_view name, int seeds) {
  if (seeds < 0) throw ConfigError("--seeds must be non-negative");
  if (name == "equivalence") return equivalence(seeds ? seeds : 100);
  if (name == "gradcheck") return gradcheck_suite(seeds ? seeds : 5);
  if (name == "identities") return identities(seeds ? seeds : 10);
  if (name == "cost") return cost();
  throw ConfigError("unknown suite '" + std::string(name) + "' (equivalence, gradcheck, identities, cost)");
}

}  // namespace fade
