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

#include "fade/costmodel.hpp"

#include <array>
#include <cstdio>
#include <sstream>

namespace fade {

namespace {

constexpr std::array kRows = {
    std::pair{CostRow::carafe, "carafe"},
    std::pair{CostRow::indexnet_hin, "indexnet_hin"},
    std::pair{CostRow::indexnet_m2o, "indexnet_m2o"},
    std::pair{CostRow::a2u, "a2u"},
    std::pair{CostRow::sapa, "sapa"},
    std::pair{CostRow::fade, "fade"},
    std::pair{CostRow::fade_lite, "fade_lite"},
    std::pair{CostRow::encoder_only, "encoder_only"},
    std::pair{CostRow::naive, "naive"},
    std::pair{CostRow::nearest, "nearest"},
    std::pair{CostRow::bilinear, "bilinear"},
};

constexpr std::array kRowList = [] {
  std::array<CostRow, kRows.size()> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = kRows[i].first;
  return out;
}();

void check(const CostQuery& q) {
  for (auto [v, name] : {std::pair{q.C, "C"}, {q.d, "d"}, {q.K, "K"}, {q.H, "H"}, {q.W, "W"}})
    if (v <= 0) throw ConfigError(std::string(name) + " must be positive");
}

struct Poly {
  std::int64_t kernel = 0, assembly = 0, fusion = 0, params = 0, extras = 0;
};

Poly evaluate(const CostQuery& q) {
  const std::int64_t C = q.C, d = q.d, K2 = q.K * q.K;
  Poly p;
  switch (q.row) {
    case CostRow::carafe:
      p = {C * d + 36 * K2 * d, 4 * K2 * C, 0, C * d + 36 * K2 * d, d + 4 * K2};
      break;
    case CostRow::indexnet_hin:
      p = {32 * C * C + 8 * C, 4 * C, 0, 32 * C * C + 8 * C, 0};
      break;
    case CostRow::indexnet_m2o:
      p = {68 * C * C, 4 * C, 0, 68 * C * C, 0};
      break;
    case CostRow::a2u:
      p = {73 * C + 4 * K2, 4 * K2 * C, 0, 4 * K2 * C + 2 * C, 0};
      break;
    case CostRow::sapa:
      p = {5 * C * d + 4 * K2 * d, 4 * K2 * C, 0, 2 * C * d, 0};
      break;
    case CostRow::fade:
      p = {5 * C * d + 45 * K2 * d, 4 * K2 * C, 0, 2 * C * d + 9 * K2 * d, d + K2};
      break;
    case CostRow::fade_lite:
      p = {5 * C * K2 + 45 * K2, 4 * K2 * C, 0, 2 * C * K2 + 9 * K2, 2 * K2};
      break;
    // Same counting scheme, evaluated for the ablation pipelines: the
    // encoder-rate 1x1 and 3x3 layers run at four positions per decoder
    // position.
    case CostRow::encoder_only:
      p = {4 * C * d + 36 * K2 * d, 4 * K2 * C, 0, C * d + 9 * K2 * d, K2};
      break;
    case CostRow::naive:
      p = {8 * C * d + 36 * K2 * d, 4 * K2 * C, 0, 2 * C * d + 9 * K2 * d, d + K2};
      break;
    case CostRow::nearest:
    case CostRow::bilinear:
      break;
  }
  if (q.gate && (q.row == CostRow::fade || q.row == CostRow::fade_lite)) {
    p.fusion = 9 * C;
    p.params += C;
    p.extras += 1;
  }
  return p;
}

}  // namespace

std::string_view to_string(CostRow r) {
  for (const auto& [k, name] : kRows)
    if (k == r) return name;
  return "unknown";
}

CostRow parse_cost_row(std::string_view s) {
  for (const auto& [k, name] : kRows)
    if (s == name) return k;
  throw ConfigError("unknown cost row '" + std::string(s) + "'");
}

std::span<const CostRow> all_cost_rows() { return kRowList; }

CostReport flops_of(const CostQuery& q) {
  check(q);
  const Poly p = evaluate(q);
  CostReport r;
  r.row = std::string(to_string(q.row));
  if ((q.row == CostRow::fade || q.row == CostRow::fade_lite) && !q.gate) r.row += " (G=1)";
  r.kernel_generation = p.kernel;
  r.assembly = p.assembly;
  r.fusion = p.fusion;
  r.macs_per_position = p.kernel + p.assembly + p.fusion;
  r.flops = 2 * r.macs_per_position * q.H * q.W;
  r.params = p.params;
  r.extras = p.extras;
  return r;
}

std::int64_t params_of(const CostQuery& q) {
  check(q);
  return evaluate(q).params;
}

CostQuery cost_query_for(const OperatorConfig& cfg, std::int64_t H, std::int64_t W) {
  CostQuery q;
  q.C = cfg.C;
  q.d = cfg.d;
  q.K = cfg.K;
  q.H = H;
  q.W = W;
  q.gate = fusion_of(cfg) == Fusion::gated;
  switch (kernel_source(cfg)) {
    case KernelSource::none:
      q.row = cfg.variant == Variant::bilinear ? CostRow::bilinear : CostRow::nearest;
      break;
    case KernelSource::encoder: q.row = CostRow::encoder_only; break;
    case KernelSource::decoder: q.row = CostRow::carafe; break;
    case KernelSource::naive: q.row = CostRow::naive; break;
    case KernelSource::semishift: q.row = CostRow::fade; break;
    case KernelSource::semishift_lite: q.row = CostRow::fade_lite; break;
  }
  return q;
}

std::int64_t params_of(const OperatorConfig& cfg) { return params_of(cost_query_for(cfg)); }

std::int64_t extras_of(const OperatorConfig& cfg) {
  return flops_of(cost_query_for(cfg)).extras;
}

template <typename T>
Reconciliation reconcile(const UpsampleOperator<T>& op) {
  Reconciliation r;
  for (const auto& p : parameters(op.weights())) {
    const auto n = static_cast<std::int64_t>(p.value->numel());
    r.tensors.push_back({p.name, p.value->shape(), n, p.role});
    switch (p.role) {
      case ParamRole::counted: r.counted += n; break;
      case ParamRole::extra: r.extras += n; break;
      case ParamRole::adapter: r.adapter += n; break;
    }
  }
  r.expected_counted = params_of(op.config());
  r.expected_extras = extras_of(op.config());
  if (r.counted != r.expected_counted || r.extras != r.expected_extras) {
    std::ostringstream os;
    os << to_string(op.config().variant) << ": counted " << r.counted << " vs formula "
       << r.expected_counted << ", extras " << r.extras << " vs " << r.expected_extras << ";";
    for (const auto& t : r.tensors) os << ' ' << t.name << ' ' << t.shape.str() << '=' << t.elements;
    throw ConfigError(os.str());
  }
  return r;
}

std::string format_cost_table(std::span<const CostReport> rows) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-18s %10s %14s %8s\n", "row", "GFLOPs", "params", "extras");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-18s %10.2f %14lld %8lld\n", r.row.c_str(), r.gflops(),
                  static_cast<long long>(r.params), static_cast<long long>(r.extras));
    os << line;
  }
  return os.str();
}

std::string format_cost_csv(std::span<const CostReport> rows) {
  std::ostringstream os;
  os << "row,GFLOPs,params,extras\n";
  char line[128];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%s,%.4f,%lld,%lld\n", r.row.c_str(), r.gflops(),
                  static_cast<long long>(r.params), static_cast<long long>(r.extras));
    os << line;
  }
  return os.str();
}

template Reconciliation reconcile(const UpsampleOperator<float>&);
template Reconciliation reconcile(const UpsampleOperator<double>&);

}  // namespace fade
