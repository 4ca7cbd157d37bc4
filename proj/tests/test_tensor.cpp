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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fade/tensor.hpp"
#include "fade/tensor_io.hpp"
#include "oracles.hpp"

using namespace fade;

namespace {

Tensor<double> identity3x3(int channels) {
  Tensor<double> w({channels, channels, 3, 3});
  for (int c = 0; c < channels; ++c) w.at(c, c, 1, 1) = 1.0;
  return w;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fade_test_" + name);
}

}  // namespace

TEST(Shape, NumelAndValidation) {
  EXPECT_EQ((Shape{2, 3, 4, 5}.numel()), 120u);
  EXPECT_THROW(Tensor<float>({0, 1, 1, 1}), ShapeError);
  EXPECT_THROW(Tensor<float>({1, 1, 2, 2}, std::vector<float>(3)), ShapeError);
  Tensor<float> t;
  EXPECT_EQ(t.numel(), 1u);
}

TEST(Conv2d, IdentityKernelReturnsInput) {
  const auto x = oracle::random<double>({2, 3, 5, 4}, 1);
  EXPECT_EQ(conv2d(x, identity3x3(3), nullptr, 1, PadSpec::uniform(1)), x);
}

TEST(Conv2d, AllOnesKernelOnTwoByTwo) {
  // Every 3x3 window of a padded 2x2 input covers all four values.
  Tensor<double> x({1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor<double> w({1, 1, 3, 3}, 1.0);
  const auto y = conv2d(x, w, nullptr, 1, PadSpec::uniform(1));
  EXPECT_EQ(y, oracle::conv(x, w, nullptr, 1, PadSpec::uniform(1)));
  for (double v : oracle::values(y)) EXPECT_EQ(v, 10.0);
}

TEST(Conv2d, ZeroInputZeroBias) {
  Tensor<float> x({1, 2, 4, 4});
  const auto w = oracle::random<float>({3, 2, 3, 3}, 2);
  Tensor<float> b({1, 3, 1, 1});
  for (float v : oracle::values(conv2d(x, w, &b, 1, PadSpec::uniform(1)))) EXPECT_EQ(v, 0.0f);
}

TEST(Conv2d, MatchesOracleStridedAsymmetric) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const int C = 1 + static_cast<int>(rng.below(3)), O = 1 + static_cast<int>(rng.below(3));
    const int H = 1 + static_cast<int>(rng.below(7)), W = 1 + static_cast<int>(rng.below(7));
    const int k = 1 + 2 * static_cast<int>(rng.below(2)), stride = 1 + static_cast<int>(rng.below(2));
    PadSpec pad{static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2)),
                static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2))};
    if (H + pad.top + pad.bottom < k || W + pad.left + pad.right < k) continue;
    const auto x = oracle::random<double>({2, C, H, W}, seed + 100);
    const auto w = oracle::random<double>({O, C, k, k}, seed + 200);
    const auto b = oracle::random<double>({1, O, 1, 1}, seed + 300);
    const auto got = conv2d(x, w, &b, stride, pad);
    const auto want = oracle::conv(x, w, &b, stride, pad);
    ASSERT_EQ(got.shape(), want.shape());
    EXPECT_LE(oracle::max_rel(got, want), 1e-14) << "seed " << seed;
  }
}

TEST(Conv2d, Errors) {
  Tensor<float> x({1, 2, 3, 3});
  EXPECT_THROW(conv2d(x, Tensor<float>({1, 3, 3, 3}), nullptr, 1, PadSpec::uniform(1)), ShapeError);
  EXPECT_THROW(conv2d(Tensor<float>({1, 2, 1, 1}), Tensor<float>({1, 2, 3, 3}), nullptr, 1, PadSpec{}),
               ShapeError);
  EXPECT_THROW(conv2d(x, Tensor<float>({1, 2, 3, 3}), nullptr, 1, PadSpec{-1, 0, 0, 0}), ShapeError);
}

TEST(Conv2d, LinearInInput) {
  const auto x = oracle::random<double>({1, 3, 6, 6}, 3);
  const auto y = oracle::random<double>({1, 3, 6, 6}, 4);
  const auto w = oracle::random<double>({2, 3, 3, 3}, 5);
  const double a = 0.7, b = -1.3;
  const auto lhs = conv2d(add(scale(x, a), scale(y, b)), w, nullptr, 1, PadSpec::uniform(1));
  const auto rhs = add(scale(conv2d(x, w, nullptr, 1, PadSpec::uniform(1)), a),
                       scale(conv2d(y, w, nullptr, 1, PadSpec::uniform(1)), b));
  EXPECT_LE(max_rel_diff(lhs, rhs), 1e-6);
}

TEST(Conv2dDepthwise, IdentityAndSingleChannelReduction) {
  const auto x = oracle::random<double>({1, 4, 5, 5}, 6);
  Tensor<double> id({4, 1, 3, 3});
  for (int c = 0; c < 4; ++c) id.at(c, 0, 1, 1) = 1.0;
  EXPECT_EQ(conv2d_depthwise(x, id, nullptr, 1, PadSpec::uniform(1)), x);

  const auto x1 = oracle::random<double>({1, 1, 5, 5}, 7);
  const auto w1 = oracle::random<double>({1, 1, 3, 3}, 8);
  EXPECT_EQ(conv2d_depthwise(x1, w1, nullptr, 1, PadSpec::uniform(1)),
            conv2d(x1, w1, nullptr, 1, PadSpec::uniform(1)));
}

TEST(Conv2dDepthwise, MatchesPerChannelOracle) {
  const auto x = oracle::random<double>({1, 4, 6, 6}, 9);
  const auto w = oracle::random<double>({4, 1, 3, 3}, 10);
  const auto b = oracle::random<double>({1, 4, 1, 1}, 11);
  EXPECT_LE(oracle::max_rel(conv2d_depthwise(x, w, &b, 1, PadSpec::uniform(1)),
                            oracle::depthwise(x, w, &b, PadSpec::uniform(1))),
            1e-14);
  EXPECT_THROW(conv2d_depthwise(x, Tensor<double>({3, 1, 3, 3}), nullptr, 1, PadSpec::uniform(1)),
               ShapeError);
}

TEST(Conv1x1, IdentityBiasAndConvAgreement) {
  const auto x = oracle::random<float>({2, 3, 4, 5}, 12);
  Tensor<float> eye({3, 3, 1, 1});
  for (int c = 0; c < 3; ++c) eye.at(c, c, 0, 0) = 1.0f;
  EXPECT_EQ(conv1x1(x, eye, nullptr), x);

  Tensor<float> zeros({1, 3, 2, 2});
  Tensor<float> a({1, 3, 1, 1}, {0.5f, -2.0f, 7.0f});
  const auto y = conv1x1(zeros, eye, &a);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 4; ++i) EXPECT_EQ(y.plane(0, c)[i], a[c]);

  const auto w = oracle::random<float>({4, 3, 1, 1}, 13);
  EXPECT_EQ(conv1x1(x, w, nullptr), conv2d(x, w, nullptr, 1, PadSpec{}));
  EXPECT_THROW(conv1x1(x, Tensor<float>({4, 3, 3, 3}), nullptr), ShapeError);
}

TEST(InterpNearest, Definition) {
  Tensor<double> one({1, 1, 1, 1}, {7});
  for (double v : oracle::values(interp_nearest_x2(one))) EXPECT_EQ(v, 7.0);
  Tensor<double> x({1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor<double> want({1, 1, 4, 4}, {1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4});
  EXPECT_EQ(interp_nearest_x2(x), want);
}

TEST(InterpNearest, SubsampleRoundTripBitExact) {
  const auto x = oracle::random<float>({2, 3, 5, 7}, 14);
  EXPECT_EQ(subsample_x2(interp_nearest_x2(x)), x);
}

TEST(InterpBilinear, AlignCornersClosedForm) {
  const double a = 2.0, b = 5.0;
  Tensor<double> x({1, 1, 1, 2}, {a, b});
  const auto y = interp_bilinear_x2(x, true);
  ASSERT_EQ(y.shape(), (Shape{1, 1, 2, 4}));
  const double want[4] = {a, (2 * a + b) / 3, (a + 2 * b) / 3, b};
  for (int r = 0; r < 2; ++r)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(y.at(0, 0, r, j), want[j], 1e-14);
}

TEST(InterpBilinear, HalfPixelClosedForm) {
  // Half-pixel centres: outputs sample at 0.25-pixel offsets, clamped at the borders.
  Tensor<double> x({1, 1, 1, 2}, {0.0, 4.0});
  const auto y = interp_bilinear_x2(x, false);
  const double want[4] = {0.0, 1.0, 3.0, 4.0};
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(y.at(0, 0, 0, j), want[j], 1e-14);
}

TEST(InterpBilinear, ConstantAndConvexity) {
  for (bool ac : {false, true}) {
    Tensor<float> c({1, 2, 3, 5}, 0.3f);
    for (float v : oracle::values(interp_bilinear_x2(c, ac))) EXPECT_EQ(v, 0.3f);
    const auto x = oracle::random<float>({1, 2, 4, 3}, 15);
    const auto [lo, hi] = std::minmax_element(x.data().begin(), x.data().end());
    for (float v : oracle::values(interp_bilinear_x2(x, ac))) {
      EXPECT_GE(v, *lo);
      EXPECT_LE(v, *hi);
    }
  }
}

TEST(Maxpool, DefinitionRoundTripAndErrors) {
  Tensor<double> x({1, 1, 2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(maxpool2x2(x)[0], 4.0);
  Tensor<double> c({1, 1, 4, 4}, -2.5);
  for (double v : oracle::values(maxpool2x2(c))) EXPECT_EQ(v, -2.5);
  const auto r = oracle::random<double>({2, 2, 3, 3}, 16);
  EXPECT_EQ(maxpool2x2(interp_nearest_x2(r)), r);
  EXPECT_THROW(maxpool2x2(Tensor<double>({1, 1, 3, 4})), ShapeError);
}

TEST(Softmax, UniformSaturationShiftAndSums) {
  Tensor<double> eq({1, 5, 2, 2}, 3.0);
  for (double v : oracle::values(softmax_channel(eq))) EXPECT_NEAR(v, 0.2, 1e-15);

  Tensor<double> spike({1, 4, 1, 1}, {0, 1000, 0, 0});
  const auto s = softmax_channel(spike);
  EXPECT_NEAR(s[1], 1.0, 1e-6);
  EXPECT_NEAR(s[0], 0.0, 1e-6);

  const auto x = oracle::random<double>({2, 6, 3, 3}, 17, -5, 5);
  auto shifted = x;
  for (int n = 0; n < 2; ++n)
    for (int p = 0; p < 9; ++p) {
      const double k = 10.0 * (n + 1) + p;
      for (int c = 0; c < 6; ++c) shifted.plane(n, c)[p] += k;
    }
  EXPECT_LE(max_abs_diff(softmax_channel(x), softmax_channel(shifted)), 1e-12);

  const auto y = softmax_channel(x);
  for (int n = 0; n < 2; ++n)
    for (int p = 0; p < 9; ++p) {
      double sum = 0.0;
      for (int c = 0; c < 6; ++c) {
        const double v = y.plane(n, c)[p];
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-6);
    }
}

TEST(Sigmoid, ValuesSymmetryAndOverflow) {
  Tensor<double> x({1, 1, 1, 4}, {0.0, 2.5, -800.0, 800.0});
  const auto y = sigmoid(x);
  EXPECT_EQ(y[0], 0.5);
  EXPECT_GE(y[2], 0.0);
  EXPECT_LT(y[2], 1e-300);
  EXPECT_EQ(y[3], 1.0);
  EXPECT_TRUE(y.all_finite());
  const auto r = oracle::random<double>({1, 2, 3, 3}, 18, -40, 40);
  const auto p = sigmoid(r), m = sigmoid(scale(r, -1.0));
  for (std::size_t i = 0; i < r.numel(); ++i) EXPECT_NEAR(p[i] + m[i], 1.0, 1e-15);
}

TEST(PixelShuffle, DefinitionBijectionAndErrors) {
  Tensor<double> x({1, 4, 1, 1}, {1, 2, 3, 4});
  Tensor<double> want({1, 1, 2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(pixel_shuffle_x2(x), want);

  const auto r = oracle::random<float>({2, 8, 3, 2}, 19);
  const auto s = pixel_shuffle_x2(r);
  EXPECT_EQ(pixel_unshuffle_x2(s), r);
  std::vector<float> a(r.data().begin(), r.data().end()), b(s.data().begin(), s.data().end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
  for (int co = 0; co < 2; ++co)
    for (int y = 0; y < 3; ++y)
      for (int xx = 0; xx < 2; ++xx)
        for (int rr = 0; rr < 2; ++rr)
          for (int ss = 0; ss < 2; ++ss)
            EXPECT_EQ(s.at(1, co, 2 * y + rr, 2 * xx + ss), r.at(1, 4 * co + 2 * rr + ss, y, xx));
  EXPECT_THROW(pixel_shuffle_x2(Tensor<float>({1, 6, 2, 2})), ShapeError);
}

TEST(Phases, InterleaveExtractRoundTrip) {
  const auto x = oracle::random<double>({1, 2, 6, 4}, 20);
  const auto p00 = extract_phase(x, 0, 0), p01 = extract_phase(x, 0, 1);
  const auto p10 = extract_phase(x, 1, 0), p11 = extract_phase(x, 1, 1);
  EXPECT_EQ(interleave_phases(p00, p01, p10, p11), x);
  EXPECT_EQ(p00, subsample_x2(x));
}

TEST(Primitives, DeterministicAcrossCalls) {
  const auto x = oracle::random<float>({2, 3, 8, 8}, 21);
  const auto w = oracle::random<float>({4, 3, 3, 3}, 22);
  EXPECT_EQ(conv2d(x, w, nullptr, 2, PadSpec{1, 0, 1, 0}), conv2d(x, w, nullptr, 2, PadSpec{1, 0, 1, 0}));
  EXPECT_EQ(softmax_channel(x), softmax_channel(x));
  EXPECT_EQ(interp_bilinear_x2(x), interp_bilinear_x2(x));
}

TEST(Primitives, FiniteOutputsForFiniteInputs) {
  const auto x = oracle::random<float>({1, 4, 4, 4}, 23, -50, 50);
  EXPECT_TRUE(softmax_channel(x).all_finite());
  EXPECT_TRUE(sigmoid(x).all_finite());
  EXPECT_TRUE(interp_bilinear_x2(x).all_finite());
}

TEST(Ften, RoundTripBothPrecisions) {
  const auto f = oracle::random<float>({2, 3, 4, 5}, 24);
  const auto d = oracle::random<double>({1, 1, 3, 2}, 25);
  const auto pf = temp_path("rt_f32.ften"), pd = temp_path("rt_f64.ften");
  write_ften(pf, f);
  write_ften(pd, d);
  EXPECT_EQ(std::get<Tensor<float>>(read_ften(pf)), f);
  EXPECT_EQ(std::get<Tensor<double>>(read_ften(pd)), d);
  EXPECT_EQ(std::filesystem::file_size(pf), kFtenHeaderBytes + f.numel() * 4);
  EXPECT_EQ(read_ften_as<double>(pf), (cast<float, double>(f)));
}

TEST(Ften, ExactByteLayout) {
  Tensor<float> t({1, 2, 1, 1}, {1.0f, -2.0f});
  std::ostringstream os;
  write_ften(os, t);
  const std::string b = os.str();
  ASSERT_EQ(b.size(), 32u);
  EXPECT_EQ(b.substr(0, 4), "FTEN");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 1);
  EXPECT_EQ(b[6], 0);
  EXPECT_EQ(b[7], 0);
  const unsigned char dims[16] = {1, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0};
  EXPECT_EQ(b.substr(8, 16), std::string(reinterpret_cast<const char*>(dims), 16));
  // IEEE-754 1.0f = 0x3F800000, -2.0f = 0xC0000000, little-endian.
  const unsigned char vals[8] = {0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x00, 0xC0};
  EXPECT_EQ(b.substr(24), std::string(reinterpret_cast<const char*>(vals), 8));
}

TEST(Ften, RejectsMalformedFiles) {
  Tensor<double> t({1, 1, 2, 2}, {1, 2, 3, 4});
  std::ostringstream os;
  write_ften(os, t);
  const std::string good = os.str();
  auto reject = [](std::string bytes) {
    std::istringstream is(bytes);
    EXPECT_THROW(read_ften(is), FormatError);
  };
  std::string bad = good;
  bad[0] = 'X';
  reject(bad);
  bad = good;
  bad[4] = 2;
  reject(bad);
  bad = good;
  bad[5] = 7;
  reject(bad);
  bad = good;
  bad[6] = 1;
  reject(bad);
  reject(good.substr(0, good.size() - 1));
  reject(good.substr(0, 10));
  bad = good;
  bad[8] = 0;  // n = 0
  reject(bad);
  EXPECT_THROW(read_ften(temp_path("does_not_exist.ften")), FormatError);
}

TEST(Pgm, HeaderAndNormalization) {
  Tensor<float> t({1, 2, 2, 3}, {0, 1, 2, 3, 4, 5, 9, 9, 9, 9, 9, 9});
  const auto p = temp_path("plane.pgm");
  write_pgm(p, t, 0, 0);
  std::ifstream is(p, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(is)), {});
  const std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(content.substr(0, header.size()), header);
  const std::string px = content.substr(header.size());
  ASSERT_EQ(px.size(), 6u);
  EXPECT_EQ(static_cast<unsigned char>(px[0]), 0);
  EXPECT_EQ(static_cast<unsigned char>(px[5]), 255);
  EXPECT_EQ(static_cast<unsigned char>(px[1]), 51);
  write_pgm(p, t, 0, 1);
  std::ifstream is2(p, std::ios::binary);
  std::string flat((std::istreambuf_iterator<char>(is2)), {});
  for (char c : flat.substr(header.size())) EXPECT_EQ(c, 0);
  EXPECT_THROW(write_pgm(p, t, 0, 2), ShapeError);
}
