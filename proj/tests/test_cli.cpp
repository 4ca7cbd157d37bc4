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

#include "cli_runner.hpp"
#include "fade/operators.hpp"
#include "fade/tensor_io.hpp"
#include "oracles.hpp"

using namespace fade;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = cli::fresh_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    write_ften(dir_ / "de.ften", oracle::random<float>({1, 8, 4, 4}, 1));
    write_ften(dir_ / "en.ften", oracle::random<float>({1, 8, 8, 8}, 2));
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  cli::Result run(const std::string& args, const std::string& env = "") { return cli::run(dir_, args, env); }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(Cli, NearestMatchesPrimitive) {
  Tensor<float> x({1, 1, 2, 2});
  for (int i = 0; i < 4; ++i) x[i] = static_cast<float>(i + 1);
  write_ften(dir_ / "x.ften", x);
  const auto r = run("upsample --variant nearest --decoder x.ften --out y.ften");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto y = read_ften_as<float>(dir_ / "y.ften");
  EXPECT_EQ(y, interp_nearest_x2(x));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "y.ften.manifest.json"));
}

TEST_F(Cli, SemiShiftFormsAgree) {
  ASSERT_EQ(run("upsample --decoder de.ften --encoder en.ften --impl h2l --seed 3 --out a.ften").code, 0);
  ASSERT_EQ(run("upsample --decoder de.ften --encoder en.ften --impl l2h --seed 3 --out b.ften").code, 0);
  ASSERT_EQ(run("upsample --decoder de.ften --encoder en.ften --impl direct --seed 3 --out c.ften").code, 0);
  const auto a = read_ften_as<float>(dir_ / "a.ften");
  EXPECT_LE(max_abs_diff(a, read_ften_as<float>(dir_ / "b.ften")), 1e-5f);
  EXPECT_LE(max_abs_diff(a, read_ften_as<float>(dir_ / "c.ften")), 1e-5f);
}

TEST_F(Cli, ExitCodes) {
  auto r = run("upsample --decoder de.ften --out y.ften");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("--encoder"), std::string::npos) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  {
    std::ofstream os(dir_ / "bad.ften", std::ios::binary);
    os << "FTEN";
  }
  EXPECT_EQ(run("upsample --variant nearest --decoder bad.ften --out y.ften").code, 2);
  EXPECT_EQ(run("upsample --variant nearest --decoder missing.ften --out y.ften").code, 2);
  EXPECT_EQ(run("upsample --decoder de.ften --encoder de.ften --out y.ften").code, 3);
  EXPECT_EQ(run("upsample --variant b9 --decoder de.ften --out y.ften").code, 3);
  EXPECT_EQ(run("upsample --decoder de.ften").code, 3);
  EXPECT_EQ(run("cost --K 4 --rows nope").code, 3);
  EXPECT_EQ(run("verify --suite nope").code, 3);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, LoadsCheckpoint) {
  OperatorConfig cfg;
  cfg.variant = Variant::carafe;
  cfg.C = 8;
  cfg.d = 4;
  cfg.K = 3;
  cfg.seed = 77;
  const auto op = build_operator<float>(cfg);
  save_weights(dir_ / "w.fckp", op);
  ASSERT_EQ(run("upsample --decoder de.ften --variant carafe --d 4 --K 3 --weights w.fckp --out a.ften").code, 0);
  EXPECT_EQ(read_ften_as<float>(dir_ / "a.ften"), op.forward(nullptr, read_ften_as<float>(dir_ / "de.ften")));
  EXPECT_EQ(run("upsample --decoder de.ften --variant carafe --d 5 --K 3 --weights w.fckp --out b.ften").code, 3);
  {
    std::ofstream os(dir_ / "empty.fckp", std::ios::binary);
  }
  EXPECT_EQ(run("upsample --decoder de.ften --variant carafe --weights empty.fckp --out b.ften").code, 2);
}

TEST_F(Cli, VerifyCostPrintsGoldenFigures) {
  const auto r = run("verify --suite cost");
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* s : {"2.50", "4.56", "1.53", "74K", "47K", "13K", "suite cost: PASS"})
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
}

TEST_F(Cli, VerifyIdentitiesAndEquivalence) {
  EXPECT_EQ(run("verify --suite identities").code, 0);
  const auto r = run("verify --suite equivalence --seeds 20");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("over 20 cases"), std::string::npos);
}

TEST_F(Cli, CostCsv) {
  const auto r = run("cost --rows carafe,fade_lite --format csv --out t.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "row,GFLOPs,params,extras\ncarafe,2.4984,73984,164\nfade_lite,1.5311,13281,51\n");
  EXPECT_EQ(cli::slurp(dir_ / "t.csv"), r.out);
}

TEST_F(Cli, ConfigFilePrecedence) {
  {
    std::ofstream os(dir_ / "run.cfg");
    os << "# defaults for this run\nvariant = carafe\nd=4\nK = 3\n";
  }
  ASSERT_EQ(run("upsample --decoder de.ften --out a.ften --K 5", "FADE_CONFIG=run.cfg").code, 0);
  ASSERT_EQ(run("upsample --decoder de.ften --out b.ften --variant carafe --d 4 --K 5").code, 0);
  EXPECT_EQ(cli::slurp(dir_ / "a.ften"), cli::slurp(dir_ / "b.ften"));
  const auto m = cli::slurp(dir_ / "a.ften.manifest.json");
  EXPECT_NE(m.find("\"variant\": \"carafe\""), std::string::npos);
  EXPECT_NE(m.find("\"K\": \"5\""), std::string::npos);
  {
    std::ofstream os(dir_ / "typo.cfg");
    os << "varient = carafe\n";
  }
  EXPECT_EQ(run("--config typo.cfg cost").code, 3);
}

TEST_F(Cli, RerunsAreByteIdentical) {
  const std::string env = "FADE_TIMESTAMP=2000-01-01T00:00:00Z";
  for (const char* out : {"a", "b"}) {
    ASSERT_EQ(run(std::string("upsample --decoder de.ften --encoder en.ften --seed 9 --d 4 --out ") + out + ".ften",
                  env).code,
              0);
    ASSERT_EQ(run(std::string("train --task binary --epochs 1 --size 16 --count 4 --test-count 2 --outdir ") + out,
                  env).code,
              0);
  }
  EXPECT_EQ(cli::slurp(dir_ / "a.ften"), cli::slurp(dir_ / "b.ften"));
  for (const char* f : {"history.csv", "summary.csv", "prediction.pgm", "gate2.pgm"})
    EXPECT_EQ(cli::slurp(dir_ / "a" / f), cli::slurp(dir_ / "b" / f)) << f;
}

TEST_F(Cli, AblateTable) {
  const auto r = run("ablate --seeds 2 --epochs 1 --size 16 --count 4 --test-count 2 --outdir ab");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = cli::slurp(dir_ / "ab" / "ablation_miou.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "variant,label,seed_0,seed_1,mean");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_NE(csv.find("decoder-only (CARAFE)"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "ab" / "cells" / "b6_full_seed1.csv"));
}
