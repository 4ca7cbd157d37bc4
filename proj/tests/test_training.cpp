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
#include <limits>
#include <set>
#include <vector>

#include "fade/metrics.hpp"
#include "fade/optim.hpp"
#include "fade/toy.hpp"
#include "fade/train.hpp"
#include "oracles.hpp"

using namespace fade;

TEST(Sgd, MomentumRecurrenceByHand) {
  Tensor<double> p({1, 1, 1, 2});
  p[0] = 1.0;
  p[1] = -2.0;
  Sgd<double> opt(0.1, 0.5);
  Tensor<double>* ps[] = {&p};
  const double g0[] = {1.0, 2.0}, g1[] = {-1.0, 0.5};
  for (const double* g : {g0, g1}) {
    Tensor<double> grad({1, 1, 1, 2});
    grad[0] = g[0];
    grad[1] = g[1];
    opt.step(ps, std::span<const Tensor<double>>(&grad, 1));
  }
  // v1 = g0, p1 = p0 - 0.1 g0; v2 = 0.5 g0 + g1, p2 = p1 - 0.1 v2.
  EXPECT_NEAR(p[0], 1.0 - 0.1 * 1.0 - 0.1 * (0.5 - 1.0), 1e-15);
  EXPECT_NEAR(p[1], -2.0 - 0.1 * 2.0 - 0.1 * (1.0 + 0.5), 1e-15);
}

TEST(Sgd, RejectsNonFiniteWithoutTouchingParams) {
  Tensor<double> a({1, 1, 1, 1}, 1.0), b({1, 1, 1, 1}, 2.0);
  Tensor<double>* ps[] = {&a, &b};
  std::vector<Tensor<double>> grads = {Tensor<double>({1, 1, 1, 1}, 1.0),
                                       Tensor<double>({1, 1, 1, 1}, std::numeric_limits<double>::quiet_NaN())};
  Sgd<double> opt(0.1);
  EXPECT_THROW(opt.step(ps, grads), NumericError);
  EXPECT_EQ(a[0], 1.0);
  EXPECT_EQ(b[0], 2.0);
  EXPECT_THROW(Sgd<double>(0.0), ConfigError);
  EXPECT_THROW(Sgd<double>(0.1, 1.0), ConfigError);
}

TEST(Metrics, MiouWorkedExample) {
  const std::vector<int> target = {0, 0, 1, 1};
  const std::vector<int> pred = {0, 1, 1, 1};
  // class 0: 1/2, class 1: 2/3
  EXPECT_NEAR(metric_miou(pred, target, 2), (0.5 + 2.0 / 3) / 2, 1e-15);
  EXPECT_EQ(metric_miou(target, target, 3), 1.0);  // class 2 skipped
  const std::vector<int> stray = {0, 0, 1, 2};
  EXPECT_NEAR(metric_miou(stray, target, 3), (1.0 + 0.5 + 0.0) / 3, 1e-15);
}

TEST(Metrics, ArgmaxMsePsnr) {
  Tensor<double> logits({1, 3, 1, 2});
  logits.at(0, 2, 0, 0) = 1.0;
  logits.at(0, 1, 0, 1) = 0.5;
  EXPECT_EQ(argmax_labels(logits), (std::vector<int>{2, 1}));

  Tensor<double> a({1, 1, 1, 4}), b({1, 1, 1, 4});
  b[0] = 0.2;
  EXPECT_NEAR(metric_mse(a, b), 0.01, 1e-15);
  EXPECT_NEAR(metric_psnr(a, b), 20.0, 1e-12);
  EXPECT_EQ(metric_psnr(a, a), kPsnrCap);
}

TEST(Metrics, BandIouOnSquare) {
  // 8x8 image, class 1 square at [2, 6) x [2, 6).
  const int S = 8;
  std::vector<int> t(S * S, 0);
  for (int y = 2; y < 6; ++y)
    for (int x = 2; x < 6; ++x) t[y * S + x] = 1;
  EXPECT_EQ(metric_band_iou(t, t, 1, S, S, 2, 1), 1.0);
  // Shifting the prediction by one column breaks the band overlap.
  std::vector<int> p(S * S, 0);
  for (int y = 2; y < 6; ++y)
    for (int x = 3; x < 7; ++x) p[y * S + x] = 1;
  const double shifted = metric_band_iou(p, t, 1, S, S, 2, 1);
  EXPECT_LT(shifted, 1.0);
  EXPECT_LT(shifted, metric_miou(p, t, 2));
}

TEST(ToyTask, DeterministicPerSeed) {
  for (auto kind : {TaskKind::binary_shapes, TaskKind::multiclass_shapes, TaskKind::texture_reconstruction}) {
    const ToyTask spec{kind, 16, 4, 4, 7};
    const auto a = make_toy_task<double>(spec);
    const auto b = make_toy_task<double>(spec);
    EXPECT_EQ(a.inputs, b.inputs);
    EXPECT_EQ(a.labels, b.labels);
    auto other = spec;
    other.seed = 8;
    EXPECT_NE(make_toy_task<double>(other).inputs, a.inputs);
  }
}

TEST(ToyTask, EveryClassPresentAndRange) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto d = make_toy_task<float>({TaskKind::multiclass_shapes, 32, 4, 2, s});
    ASSERT_EQ(d.classes, 4);
    for (int n = 0; n < 2; ++n) {
      std::set<int> seen(d.labels.begin() + n * 1024, d.labels.begin() + (n + 1) * 1024);
      EXPECT_EQ(seen.size(), 4u) << "seed " << s << " image " << n;
    }
    for (float v : oracle::values(d.inputs)) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
    }
  }
  const auto bin = make_toy_task<float>({TaskKind::binary_shapes, 16, 7, 3, 1});
  EXPECT_EQ(bin.classes, 2);
  const auto rec = make_toy_task<float>({TaskKind::texture_reconstruction, 16, 2, 3, 1});
  EXPECT_FALSE(rec.segmentation());
  EXPECT_EQ(rec.targets, rec.inputs);
}

TEST(ToyTask, ParseNames) {
  EXPECT_EQ(parse_task("binary"), TaskKind::binary_shapes);
  EXPECT_EQ(parse_task("multiclass"), TaskKind::multiclass_shapes);
  EXPECT_EQ(parse_task("reconstruction"), TaskKind::texture_reconstruction);
  EXPECT_THROW(parse_task("depth"), ConfigError);
}

TEST(Train, ShortRunDeterministicAndLearns) {
  TrainConfig cfg;
  cfg.task = {TaskKind::binary_shapes, 16, 2, 8, 3};
  cfg.test_count = 4;
  cfg.epochs = 3;
  cfg.width = 4;
  cfg.d = 4;
  cfg.K = 3;
  cfg.seed = 5;
  const auto a = train_toy<float>(cfg);
  const auto b = train_toy<float>(cfg);
  ASSERT_FALSE(a.diverged) << a.divergence;
  ASSERT_EQ(a.history.size(), 3u);
  EXPECT_EQ(history_csv(a), history_csv(b));
  EXPECT_LT(a.history.back().loss, a.history.front().loss);
  EXPECT_EQ(history_csv(a).substr(0, 36), "epoch,loss,miou,band_iou,diverged\n1,");
}

TEST(Train, BandRadius) {
  EXPECT_EQ(band_radius_for(64), 2);
  EXPECT_EQ(band_radius_for(32), 1);
  EXPECT_EQ(band_radius_for(8), 1);
  EXPECT_EQ(band_radius_for(128), 4);
}
