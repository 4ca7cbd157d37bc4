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

// Command-line front end: upsample, verify, train, ablate, cost.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fade/costmodel.hpp"
#include "fade/operators.hpp"
#include "fade/suites.hpp"
#include "fade/tensor_io.hpp"
#include "fade/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fade;

namespace {

enum Exit { kOk = 0, kSuiteFailed = 1, kFormat = 2, kConfig = 3 };

/// Parsed key=value configuration file ('#' starts a comment).
std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    for (char& c : key)
      if (c == '_') c = '-';
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

/// Fills options the command line left unset from the config file.
void apply_config(CLI::App& app, CLI::App& sub, const std::map<std::string, std::string>& cfg) {
  for (const auto& [key, value] : cfg) {
    bool known = false;
    for (CLI::App* a : app.get_subcommands({}))
      known = known || a->get_option_no_throw("--" + key) != nullptr;
    if (!known) throw ConfigError("config file: unknown key '" + key + "'");
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (!opt || opt->count() > 0) continue;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1") opt->add_result(std::string("true"));
      else if (value != "false" && value != "0")
        throw ConfigError("config file: '" + key + "' expects true or false");
      else continue;
    } else {
      opt->add_result(value);
    }
    opt->run_callback();
  }
}

std::string timestamp() {
  if (const char* t = std::getenv("FADE_TIMESTAMP")) return t;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

/// Every option of the subcommand with its effective value.
json effective_config(const CLI::App& sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    std::string v;
    if (opt->count() > 0) v = opt->as<std::string>();
    else if (opt->get_expected_max() == 0) v = "false";
    else v = opt->get_default_str();
    cfg[name] = v;
  }
  return cfg;
}

void write_manifest(const fs::path& path, const CLI::App& sub, std::uint64_t seed,
                    const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
  json m;
  m["command"] = sub.get_name();
  m["config"] = effective_config(sub);
  m["seed"] = seed;
  m["inputs"] = json::array();
  for (const auto& p : inputs) m["inputs"].push_back(p.string());
  m["outputs"] = json::array();
  for (const auto& p : outputs) m["outputs"].push_back(p.string());
  m["timestamp"] = timestamp();
  m["version"] = FADE_VERSION;
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path.string());
  os << m.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os || !(os << text)) throw FormatError("cannot write " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create " + dir.string() + ": " + ec.message());
}

// upsample ------------------------------------------------------------------

struct UpsampleArgs {
  std::string variant = "fade";
  std::string encoder;
  std::string decoder;
  std::string weights;
  std::string out;
  std::string gate_pgm;
  std::string impl = "l2h";
  std::string precision = "f32";
  std::uint64_t seed = 0;
  int d = 64;
  int K = 5;
  bool fixed_gate = false;
  bool align_corners = false;
};

template <typename T>
void run_upsample(const UpsampleArgs& a, const CLI::App& sub) {
  OperatorConfig cfg;
  cfg.variant = parse_variant(a.variant);
  cfg.impl = parse_impl(a.impl);
  cfg.seed = a.seed;
  cfg.d = a.d;
  cfg.K = a.K;
  cfg.fixed_gate = a.fixed_gate;
  cfg.align_corners = a.align_corners;

  const Tensor<T> de = read_ften_as<T>(a.decoder);
  std::vector<fs::path> inputs = {a.decoder};
  std::optional<Tensor<T>> en;
  if (!a.encoder.empty() && needs_encoder(cfg.variant)) {
    en = read_ften_as<T>(a.encoder);
    inputs.push_back(a.encoder);
  }
  cfg.C = de.c();
  if (en) cfg.C_en = en->c();

  auto op = build_operator<T>(cfg);
  if (!a.weights.empty()) {
    load_weights(a.weights, op);
    inputs.push_back(a.weights);
  }
  const Tensor<T> y = op.forward(en ? &*en : nullptr, de);
  write_ften(fs::path(a.out), y);
  std::vector<fs::path> outputs = {a.out};
  if (!a.gate_pgm.empty()) {
    write_pgm(a.gate_pgm, op.gate_map(de));
    outputs.push_back(a.gate_pgm);
  }
  write_manifest(a.out + ".manifest.json", sub, a.seed, inputs, outputs);
  std::cout << to_string(cfg.variant) << ": " << de.shape().str() << " -> " << y.shape().str() << " written to "
            << a.out << '\n';
}

// verify --------------------------------------------------------------------

int run_verify(const std::string& suite, int seeds) {
  std::vector<std::string> names;
  if (suite == "all")
    for (auto n : suite_names()) names.emplace_back(n);
  else
    names.push_back(suite);
  bool all = true;
  for (const auto& n : names) {
    const auto r = run_suite(n, seeds);
    std::cout << "[" << r.name << "]\n";
    for (const auto& l : r.lines) std::cout << "  " << l << '\n';
    std::cout << "suite " << r.name << ": " << (r.passed ? "PASS" : "FAIL") << "\n";
    all = all && r.passed;
  }
  return all ? kOk : kSuiteFailed;
}

// train / ablate ------------------------------------------------------------

struct TrainArgs {
  std::string task = "binary";
  std::string variant = "fade";
  std::string impl = "l2h";
  std::string outdir;
  int epochs = 20;
  int size = 32;
  int count = 64;
  int test_count = 32;
  int classes = 4;
  int batch = 4;
  int width = 8;
  int d = 8;
  int K = 5;
  double lr = 0.05;
  double momentum = 0.9;
  double clip = 1.0;
  std::uint64_t seed = 0;
  std::int64_t task_seed = -1;
};

TrainConfig train_config(const TrainArgs& a, Variant v, std::uint64_t seed) {
  TrainConfig c;
  c.task.kind = parse_task(a.task);
  c.task.size = a.size;
  c.task.count = a.count;
  c.task.classes = c.task.kind == TaskKind::binary_shapes ? 2 : a.classes;
  c.task.seed = a.task_seed >= 0 ? static_cast<std::uint64_t>(a.task_seed) : 1000 + 10 * seed;
  c.variant = v;
  c.epochs = a.epochs;
  c.lr = a.lr;
  c.momentum = a.momentum;
  c.clip_norm = a.clip;
  c.batch = a.batch;
  c.width = a.width;
  c.d = a.d;
  c.K = a.K;
  c.test_count = a.test_count;
  c.impl = parse_impl(a.impl);
  c.seed = seed;
  return c;
}

std::string fmt_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void run_train(const TrainArgs& a, const CLI::App& sub) {
  const TrainConfig cfg = train_config(a, parse_variant(a.variant), a.seed);
  const fs::path dir = a.outdir;
  make_dir(dir);
  const TrainResult r = train_toy<float>(cfg);
  std::vector<fs::path> outputs = {dir / "history.csv", dir / "summary.csv"};
  write_text(outputs[0], history_csv(r));
  std::ostringstream summary;
  summary << "metric,value\n";
  if (r.segmentation)
    summary << "miou," << fmt_metric(r.miou) << "\nband_iou," << fmt_metric(r.band_iou) << '\n';
  else
    summary << "mse," << fmt_metric(r.mse) << "\npsnr," << fmt_metric(r.psnr) << '\n';
  summary << "diverged," << (r.diverged ? 1 : 0) << '\n';
  write_text(outputs[1], summary.str());
  if (!r.diverged) {
    const auto dump = [&](const char* name, const Tensor<double>& t) {
      outputs.push_back(dir / name);
      write_pgm(outputs.back(), t);
    };
    dump("input.pgm", r.sample_input);
    dump("target.pgm", r.sample_target);
    dump("prediction.pgm", r.sample_prediction);
    for (std::size_t i = 0; i < r.sample_gates.size(); ++i) {
      outputs.push_back(dir / ("gate" + std::to_string(i + 1) + ".pgm"));
      write_pgm(outputs.back(), r.sample_gates[i]);
    }
  }
  write_manifest(dir / "manifest.json", sub, a.seed, {}, outputs);
  if (r.diverged)
    std::cout << a.variant << ": diverged (" << r.divergence << ")\n";
  else if (r.segmentation)
    std::cout << a.variant << ": mIoU " << fmt_metric(r.miou) << "  band IoU " << fmt_metric(r.band_iou) << '\n';
  else
    std::cout << a.variant << ": MSE " << fmt_metric(r.mse) << "  PSNR " << fmt_metric(r.psnr) << '\n';
}

std::string ablation_label(Variant v) {
  switch (v) {
    case Variant::b1_encoder_only: return "encoder-only";
    case Variant::b2_decoder_only: return "decoder-only (CARAFE)";
    case Variant::b3_naive: return "encoder-decoder naive";
    case Variant::b4_semishift_nogate: return "encoder-decoder semi-shift";
    case Variant::b5_semishift_skip: return "semi-shift + skip (G=1)";
    case Variant::b6_full: return "semi-shift + gate";
    default: return std::string(to_string(v));
  }
}

void run_ablate(const TrainArgs& a, const std::string& study, int seeds, const CLI::App& sub) {
  std::vector<Variant> variants;
  if (study == "ablation")
    variants = {Variant::b1_encoder_only, Variant::b2_decoder_only, Variant::b3_naive,
                Variant::b4_semishift_nogate, Variant::b5_semishift_skip, Variant::b6_full};
  else if (study == "source")
    variants = {Variant::b1_encoder_only, Variant::b2_decoder_only, Variant::b4_semishift_nogate};
  else
    throw ConfigError("unknown study '" + study + "' (ablation, source)");
  if (seeds < 1) throw ConfigError("--seeds must be positive");

  const fs::path dir = a.outdir;
  make_dir(dir / "cells");
  std::vector<fs::path> outputs;
  std::ostringstream head, band;
  std::string header = "variant,label";
  for (int s = 0; s < seeds; ++s) header += ",seed_" + std::to_string(a.seed + s);
  header += ",mean\n";
  head << header;
  band << header;
  bool segmentation = true;

  for (Variant v : variants) {
    std::ostringstream row, brow;
    row << to_string(v) << ",\"" << ablation_label(v) << '"';
    brow << to_string(v) << ",\"" << ablation_label(v) << '"';
    double sum = 0.0, bsum = 0.0;
    int ok = 0;
    for (int s = 0; s < seeds; ++s) {
      const std::uint64_t seed = a.seed + s;
      const TrainResult r = train_toy<float>(train_config(a, v, seed));
      segmentation = r.segmentation;
      outputs.push_back(dir / "cells" / (std::string(to_string(v)) + "_seed" + std::to_string(seed) + ".csv"));
      write_text(outputs.back(), history_csv(r));
      if (r.diverged) {
        row << ",diverged";
        brow << ",diverged";
        continue;
      }
      row << ',' << fmt_metric(r.headline());
      brow << ',' << fmt_metric(r.segmentation ? r.band_iou : r.psnr);
      sum += r.headline();
      bsum += r.segmentation ? r.band_iou : r.psnr;
      ++ok;
    }
    row << ',' << (ok ? fmt_metric(sum / ok) : std::string("nan")) << '\n';
    brow << ',' << (ok ? fmt_metric(bsum / ok) : std::string("nan")) << '\n';
    head << row.str();
    band << brow.str();
    std::cout << row.str();
  }
  const std::string primary = segmentation ? "ablation_miou.csv" : "ablation_mse.csv";
  const std::string secondary = segmentation ? "ablation_band_iou.csv" : "ablation_psnr.csv";
  outputs.push_back(dir / primary);
  write_text(outputs.back(), head.str());
  outputs.push_back(dir / secondary);
  write_text(outputs.back(), band.str());
  write_manifest(dir / "manifest.json", sub, a.seed, {}, outputs);
  std::cout << "summary written to " << (dir / primary).string() << '\n';
}

// cost ----------------------------------------------------------------------

struct CostArgs {
  std::int64_t C = 256, d = 64, K = 5, H = 112, W = 112;
  std::vector<std::string> rows;
  bool no_gate = false;
  std::string format = "text";
  std::string out;
};

void run_cost(const CostArgs& a, const CLI::App& sub) {
  std::vector<CostRow> rows;
  if (a.rows.empty())
    rows.assign(all_cost_rows().begin(), all_cost_rows().end());
  else
    for (const auto& r : a.rows) rows.push_back(parse_cost_row(r));
  std::vector<CostReport> reports;
  for (CostRow r : rows) {
    CostQuery q{r, a.C, a.d, a.K, a.H, a.W, !a.no_gate};
    reports.push_back(flops_of(q));
  }
  std::string text;
  if (a.format == "text") text = format_cost_table(reports);
  else if (a.format == "csv") text = format_cost_csv(reports);
  else throw ConfigError("unknown format '" + a.format + "' (text, csv)");
  std::cout << text;
  if (!a.out.empty()) {
    write_text(a.out, text);
    write_manifest(a.out + ".manifest.json", sub, 0, {}, {a.out});
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature upsampling operators: run, verify, train and cost", "fade"};
  app.set_version_flag("--version", FADE_VERSION);
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file (also FADE_CONFIG)")->envname("FADE_CONFIG");

  UpsampleArgs up;
  auto* upsample = app.add_subcommand("upsample", "Upsample a decoder feature file x2");
  upsample->add_option("--variant", up.variant, "Operator variant")->capture_default_str();
  upsample->add_option("--encoder", up.encoder, "Encoder guide (FTEN), twice the decoder resolution");
  upsample->add_option("--decoder", up.decoder, "Decoder feature (FTEN)")->required();
  upsample->add_option("--weights", up.weights, "Checkpoint to load instead of seeded init");
  upsample->add_option("--seed", up.seed, "Weight initialization seed")->capture_default_str();
  upsample->add_option("--impl", up.impl, "Semi-shift form: direct, h2l, l2h")->capture_default_str();
  upsample->add_option("--precision", up.precision, "f32 or f64")->capture_default_str();
  upsample->add_option("--d", up.d, "Compressed channels")->capture_default_str();
  upsample->add_option("--K", up.K, "Upsampling kernel size")->capture_default_str();
  upsample->add_flag("--fixed-gate", up.fixed_gate, "Use G = 1 for gated variants");
  upsample->add_flag("--align-corners", up.align_corners, "Bilinear corner alignment");
  upsample->add_option("--gate-pgm", up.gate_pgm, "Write the gate map of image 0 as PGM");
  upsample->add_option("--out", up.out, "Output FTEN")->required();

  std::string suite;
  int verify_seeds = 0;
  auto* verify = app.add_subcommand("verify", "Run a property suite");
  verify->add_option("--suite", suite, "equivalence, gradcheck, identities, cost or all")->required();
  verify->add_option("--seeds", verify_seeds, "Random cases (0 = suite default)")->capture_default_str();

  TrainArgs tr;
  std::string study = "ablation";
  int ablate_seeds = 5;
  auto add_train_options = [&](CLI::App* s) {
    s->add_option("--task", tr.task, "binary, multiclass or reconstruction")->capture_default_str();
    s->add_option("--epochs", tr.epochs)->capture_default_str();
    s->add_option("--seed", tr.seed, "Network seed (first seed for ablate)")->capture_default_str();
    s->add_option("--task-seed", tr.task_seed, "Dataset seed (default 1000 + 10 * seed)")->capture_default_str();
    s->add_option("--outdir", tr.outdir)->required();
    s->add_option("--size", tr.size, "Image side")->capture_default_str();
    s->add_option("--count", tr.count, "Training images")->capture_default_str();
    s->add_option("--test-count", tr.test_count, "Held-out images")->capture_default_str();
    s->add_option("--classes", tr.classes, "Classes for multiclass")->capture_default_str();
    s->add_option("--batch", tr.batch)->capture_default_str();
    s->add_option("--width", tr.width, "Hidden channels")->capture_default_str();
    s->add_option("--d", tr.d, "Compressed channels")->capture_default_str();
    s->add_option("--K", tr.K, "Upsampling kernel size")->capture_default_str();
    s->add_option("--lr", tr.lr)->capture_default_str();
    s->add_option("--momentum", tr.momentum)->capture_default_str();
    s->add_option("--clip", tr.clip, "Gradient-norm clip (0 disables)")->capture_default_str();
    s->add_option("--impl", tr.impl, "Semi-shift form: h2l or l2h")->capture_default_str();
  };
  auto* train = app.add_subcommand("train", "Train the toy encoder-decoder with one upsampler");
  add_train_options(train);
  train->add_option("--variant", tr.variant)->capture_default_str();
  auto* ablate = app.add_subcommand("ablate", "Toy ablation over variants and seeds");
  add_train_options(ablate);
  ablate->add_option("--study", study, "ablation (b1..b6) or source (b1, b2, b4)")->capture_default_str();
  ablate->add_option("--seeds", ablate_seeds, "Seeds per variant")->capture_default_str();

  CostArgs ca;
  auto* cost = app.add_subcommand("cost", "Analytic FLOPs and parameters");
  cost->add_option("--C", ca.C)->capture_default_str();
  cost->add_option("--d", ca.d)->capture_default_str();
  cost->add_option("--K", ca.K)->capture_default_str();
  cost->add_option("--H", ca.H, "Decoder height")->capture_default_str();
  cost->add_option("--W", ca.W, "Decoder width")->capture_default_str();
  cost->add_option("--rows", ca.rows, "Rows to report (default all)")->delimiter(',');
  cost->add_flag("--no-gate", ca.no_gate, "Report fade/fade_lite without gating");
  cost->add_option("--format", ca.format, "text or csv")->capture_default_str();
  cost->add_option("--out", ca.out, "Also write the table to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config_path.empty()) apply_config(app, *sub, read_config_file(config_path));
    if (sub == upsample) {
      const Precision p = parse_precision(up.precision);
      if (p == Precision::f64) run_upsample<double>(up, *sub);
      else run_upsample<float>(up, *sub);
    } else if (sub == verify) {
      return run_verify(suite, verify_seeds);
    } else if (sub == train) {
      run_train(tr, *sub);
    } else if (sub == ablate) {
      run_ablate(tr, study, ablate_seeds, *sub);
    } else if (sub == cost) {
      run_cost(ca, *sub);
    }
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << '\n';
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSuiteFailed;
  }
  return kOk;
}
