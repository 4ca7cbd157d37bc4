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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fade/operators.hpp"

namespace fade {

/// Rows of the complexity table. The first seven are the reference
/// formulas; the remaining ones cover the ablation pipelines built here.
enum class CostRow {
  carafe,
  indexnet_hin,
  indexnet_m2o,
  a2u,
  sapa,
  fade,
  fade_lite,
  encoder_only,
  naive,
  nearest,
  bilinear,
};

std::string_view to_string(CostRow r);
/// Throws ConfigError on unknown names.
CostRow parse_cost_row(std::string_view s);
std::span<const CostRow> all_cost_rows();

/// H and W are the decoder (low-resolution) dimensions. `gate` only affects
/// the fade and fade_lite rows.
struct CostQuery {
  CostRow row = CostRow::fade;
  std::int64_t C = 256;
  std::int64_t d = 64;
  std::int64_t K = 5;
  std::int64_t H = 112;
  std::int64_t W = 112;
  bool gate = true;
};

/// Stage costs are MACs per decoder position; FLOPs count two per MAC over
/// all H*W positions.
struct CostReport {
  std::string row;
  std::int64_t kernel_generation = 0;
  std::int64_t assembly = 0;
  std::int64_t fusion = 0;
  std::int64_t macs_per_position = 0;
  std::int64_t flops = 0;
  std::int64_t params = 0;
  /// Biases our implementation carries that the formulas leave out.
  std::int64_t extras = 0;

  double gflops() const { return static_cast<double>(flops) * 1e-9; }
};

/// Throws ConfigError for non-positive dimensions.
CostReport flops_of(const CostQuery& q);
std::int64_t params_of(const CostQuery& q);

/// Cost row and gate flag that describe a built operator configuration.
CostQuery cost_query_for(const OperatorConfig& cfg, std::int64_t H = 1, std::int64_t W = 1);
std::int64_t params_of(const OperatorConfig& cfg);
std::int64_t extras_of(const OperatorConfig& cfg);

struct ParamCount {
  std::string name;
  Shape shape;
  std::int64_t elements;
  ParamRole role;
};

struct Reconciliation {
  std::vector<ParamCount> tensors;
  std::int64_t counted = 0;
  std::int64_t extras = 0;
  std::int64_t adapter = 0;
  std::int64_t expected_counted = 0;
  std::int64_t expected_extras = 0;
};

/// Counts live weight elements and checks them against params_of and
/// extras_of; throws ConfigError listing every tensor on mismatch.
template <typename T>
Reconciliation reconcile(const UpsampleOperator<T>& op);

/// Aligned plain-text and CSV renderings with columns
/// (row, GFLOPs, params, extras).
std::string format_cost_table(std::span<const CostReport> rows);
std::string format_cost_csv(std::span<const CostReport> rows);

}  // namespace fade
