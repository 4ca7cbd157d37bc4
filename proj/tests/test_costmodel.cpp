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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "fade/costmodel.hpp"
#include "fade/random.hpp"

using namespace fade;

namespace {

CostQuery query(CostRow row, bool gate = true) {
  CostQuery q;
  q.row = row;
  q.gate = gate;
  return q;
}

std::string three_sig(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

TEST(CostModel, GoldenGflops) {
  EXPECT_EQ(three_sig(flops_of(query(CostRow::carafe)).gflops()), "2.50");
  EXPECT_EQ(three_sig(flops_of(query(CostRow::fade)).gflops()), "4.56");
  EXPECT_EQ(three_sig(flops_of(query(CostRow::fade_lite)).gflops()), "1.53");
}

TEST(CostModel, GoldenParams) {
  EXPECT_EQ(params_of(query(CostRow::carafe)), 73984);
  EXPECT_EQ(params_of(query(CostRow::fade)), 47424);
  EXPECT_EQ(params_of(query(CostRow::fade_lite)), 13281);
  EXPECT_EQ(params_of(query(CostRow::fade_lite, false)), 13025);
  EXPECT_EQ(params_of(query(CostRow::fade, false)), 47168);
  EXPECT_EQ(params_of(query(CostRow::a2u)), 26112);
  EXPECT_EQ(params_of(query(CostRow::indexnet_hin)), 32 * 256 * 256 + 8 * 256);
  EXPECT_EQ(params_of(query(CostRow::sapa)), 2 * 256 * 64);
}

TEST(CostModel, PerPositionTotals) {
  auto q = query(CostRow::indexnet_hin);
  q.H = q.W = 1;
  const auto r = flops_of(q);
  EXPECT_EQ(r.macs_per_position, 2100224);
  EXPECT_EQ(r.flops, 2 * 2100224);
  q.row = CostRow::indexnet_m2o;
  EXPECT_EQ(flops_of(q).macs_per_position, 68 * 256 * 256 + 4 * 256);
  q.row = CostRow::fade;
  const auto f = flops_of(q);
  EXPECT_EQ(f.kernel_generation, 5 * 256 * 64 + 45 * 25 * 64);
  EXPECT_EQ(f.assembly, 4 * 25 * 256);
  EXPECT_EQ(f.fusion, 9 * 256);
  EXPECT_EQ(f.macs_per_position, f.kernel_generation + f.assembly + f.fusion);
  q.gate = false;
  EXPECT_EQ(flops_of(q).fusion, 0);
  EXPECT_EQ(flops_of(q).row, "fade (G=1)");
}

TEST(CostModel, MacFactorTwoIsUnique) {
  // Exact integer MACs * H * W; only one integer FLOP factor reproduces all
  // three golden figures.
  const std::pair<CostRow, std::string> figures[] = {
      {CostRow::carafe, "2.50"}, {CostRow::fade, "4.56"}, {CostRow::fade_lite, "1.53"}};
  int matches = 0, factor = 0;
  for (int f = 1; f <= 8; ++f) {
    bool all = true;
    for (const auto& [row, want] : figures) {
      const auto r = flops_of(query(row));
      const std::int64_t total = f * r.macs_per_position * 112 * 112;
      all = all && three_sig(static_cast<double>(total) * 1e-9) == want;
    }
    if (all) {
      ++matches;
      factor = f;
    }
  }
  EXPECT_EQ(matches, 1);
  EXPECT_EQ(factor, 2);
}

TEST(CostModel, Monotone) {
  for (CostRow row : all_cost_rows())
    for (bool gate : {false, true})
      for (int dim = 0; dim < 5; ++dim) {
        auto q = query(row, gate);
        q.C = 16;
        q.d = 8;
        q.K = 3;
        q.H = q.W = 7;
        const auto before = flops_of(q);
        std::int64_t* fields[] = {&q.C, &q.d, &q.K, &q.H, &q.W};
        *fields[dim] += dim == 2 ? 2 : 1;
        const auto after = flops_of(q);
        EXPECT_GE(after.flops, before.flops) << to_string(row) << " dim " << dim;
        EXPECT_GE(after.params, before.params) << to_string(row) << " dim " << dim;
      }
}

TEST(CostModel, FixedInterpolatorsAreFree) {
  for (CostRow row : {CostRow::nearest, CostRow::bilinear}) {
    const auto r = flops_of(query(row));
    EXPECT_EQ(r.flops, 0);
    EXPECT_EQ(r.params, 0);
    EXPECT_EQ(r.extras, 0);
  }
}

TEST(CostModel, Errors) {
  auto q = query(CostRow::fade);
  q.C = 0;
  EXPECT_THROW(flops_of(q), ConfigError);
  EXPECT_THROW(parse_cost_row("sapa2"), ConfigError);
  for (CostRow row : all_cost_rows()) EXPECT_EQ(parse_cost_row(to_string(row)), row);
}

TEST(CostModel, Formatting) {
  const CostReport rows[] = {flops_of(query(CostRow::carafe)), flops_of(query(CostRow::fade))};
  const auto csv = format_cost_csv(rows);
  EXPECT_EQ(csv, "row,GFLOPs,params,extras\ncarafe,2.4984,73984,164\nfade,4.5616,47424,90\n");
  const auto table = format_cost_table(rows);
  EXPECT_NE(table.find("carafe"), std::string::npos);
  EXPECT_NE(table.find("2.50"), std::string::npos);
  EXPECT_NE(table.find("4.56"), std::string::npos);
}

TEST(Reconcile, EveryVariantAtRandomConfigs) {
  Rng rng(2024);
  for (int trial = 0; trial < 3; ++trial) {
    OperatorConfig base;
    base.C = 1 + static_cast<int>(rng.below(24));
    base.d = 1 + static_cast<int>(rng.below(12));
    base.K = 1 + 2 * static_cast<int>(rng.below(4));
    base.seed = trial;
    for (Variant v : all_variants()) {
      auto cfg = base;
      cfg.variant = v;
      const auto op = build_operator<float>(cfg);
      Reconciliation r;
      ASSERT_NO_THROW(r = reconcile(op)) << to_string(v);
      EXPECT_EQ(r.counted, r.expected_counted);
      EXPECT_EQ(r.extras, r.expected_extras);
      EXPECT_EQ(static_cast<std::int64_t>(op.parameter_count()), r.counted + r.extras + r.adapter);
    }
  }
}

TEST(Reconcile, WorkedCounts) {
  OperatorConfig lite;
  lite.variant = Variant::fade_lite;
  EXPECT_EQ(reconcile(build_operator<float>(lite)).counted, 13281);
  lite.fixed_gate = true;
  EXPECT_EQ(reconcile(build_operator<float>(lite)).counted, 13025);
  OperatorConfig nn;
  nn.variant = Variant::nearest;
  const auto r = reconcile(build_operator<float>(nn));
  EXPECT_EQ(r.counted, 0);
  EXPECT_EQ(r.extras, 0);
  OperatorConfig adapted;
  adapted.C_en = 128;
  EXPECT_EQ(reconcile(build_operator<float>(adapted)).adapter, 256 * 128 + 256);
}

TEST(Reconcile, MismatchListsTensors) {
  OperatorConfig cfg;
  cfg.C = 8;
  cfg.d = 4;
  cfg.K = 3;
  auto op = build_operator<float>(cfg);
  op.weights().generator->weight = Tensor<float>({9, 4, 5, 5});
  try {
    reconcile(op);
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("generator.weight"), std::string::npos);
    EXPECT_NE(msg.find("gate.weight"), std::string::npos);
  }
}
