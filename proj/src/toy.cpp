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

#include "fade/toy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fade/random.hpp"

namespace fade {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kSuper = 4;

struct Stripes {
  double freq, cx, sy, phase, amp;

  static Stripes random(Rng& rng, double amp, double min_period, double max_period) {
    const double theta = rng.uniform(0.0, std::numbers::pi);
    return {1.0 / rng.uniform(min_period, max_period), std::cos(theta), std::sin(theta),
            rng.uniform(0.0, kTwoPi), amp};
  }
  double operator()(double y, double x) const {
    return amp * std::sin(kTwoPi * freq * (x * cx + y * sy) + phase);
  }
};

struct Shape2D {
  bool ellipse;
  double cy, cx, ry, rx, cos_t, sin_t;
  int cls;
  double level;
  Stripes fill;

  bool contains(double y, double x) const {
    const double dy = y - cy, dx = x - cx;
    const double u = (dx * cos_t + dy * sin_t) / rx;
    const double v = (-dx * sin_t + dy * cos_t) / ry;
    return ellipse ? u * u + v * v <= 1.0 : std::abs(u) <= 1.0 && std::abs(v) <= 1.0;
  }
};

template <typename T>
bool draw_shapes(const ToyTask& spec, Rng& rng, T* img, int* lab) {
  const int S = spec.size, fg_classes = spec.classes - 1;
  const Stripes bg = Stripes::random(rng, 0.06, 3.0, 7.0);
  const double bg_level = rng.uniform(0.15, 0.3);
  const int shapes = fg_classes + static_cast<int>(rng.below(2));
  std::vector<Shape2D> list;
  for (int i = 0; i < shapes; ++i) {
    const double r_lo = 0.12 * S, r_hi = 0.3 * S;
    const double theta = rng.uniform(0.0, std::numbers::pi);
    Shape2D s{rng.uniform() < 0.5,
              rng.uniform(0.2 * S, 0.8 * S),
              rng.uniform(0.2 * S, 0.8 * S),
              rng.uniform(r_lo, r_hi),
              rng.uniform(r_lo, r_hi),
              std::cos(theta),
              std::sin(theta),
              i % fg_classes + 1,
              0.0,
              Stripes::random(rng, 0.06, 2.5, 6.0)};
    // Brightness separates classes; a small jitter keeps it from being a
    // pure threshold problem.
    const double base =
        fg_classes == 1 ? 0.6 : 0.45 + 0.45 * (s.cls - 1) / static_cast<double>(fg_classes - 1);
    s.level = base + rng.uniform(-0.05, 0.05);
    list.push_back(s);
  }
  std::vector<int> seen(spec.classes, 0);
  std::vector<double> cover(spec.classes);
  const double inv = 1.0 / (kSuper * kSuper);
  for (int y = 0; y < S; ++y)
    for (int x = 0; x < S; ++x) {
      std::fill(cover.begin(), cover.end(), 0.0);
      double value = 0.0;
      for (int sy = 0; sy < kSuper; ++sy)
        for (int sx = 0; sx < kSuper; ++sx) {
          const double py = y + (sy + 0.5) / kSuper, px = x + (sx + 0.5) / kSuper;
          int cls = 0;
          double v = bg_level + bg(py, px);
          for (const auto& s : list)
            if (s.contains(py, px)) {
              cls = s.cls;
              v = s.level + s.fill(py, px);
            }
          cover[cls] += inv;
          value += v * inv;
        }
      const int label = static_cast<int>(std::max_element(cover.begin(), cover.end()) - cover.begin());
      const double noise = rng.uniform(-0.03, 0.03);
      img[y * S + x] = static_cast<T>(std::clamp(value + noise, 0.0, 1.0));
      lab[y * S + x] = label;
      seen[label] = 1;
    }
  return std::all_of(seen.begin(), seen.end(), [](int v) { return v != 0; });
}

template <typename T>
void draw_texture(const ToyTask& spec, Rng& rng, T* img) {
  const int S = spec.size;
  struct Region {
    double level, amp;
    bool checker;
    Stripes a, b;
    double operator()(double y, double x) const {
      return level + amp * (checker ? a(y, x) * b(y, x) : a(y, x));
    }
  };
  auto region = [&rng]() {
    return Region{rng.uniform(0.15, 0.85), rng.uniform(0.05, 0.15), rng.uniform() < 0.5,
                  Stripes::random(rng, 1.0, 4.0, 10.0), Stripes::random(rng, 1.0, 4.0, 10.0)};
  };
  const Region background = region();
  std::vector<std::pair<Shape2D, Region>> parts;
  const int count = 2 + static_cast<int>(rng.below(2));
  for (int i = 0; i < count; ++i) {
    const double theta = rng.uniform(0.0, std::numbers::pi);
    Shape2D s{rng.uniform() < 0.5, rng.uniform(0.2 * S, 0.8 * S), rng.uniform(0.2 * S, 0.8 * S),
              rng.uniform(0.12 * S, 0.35 * S), rng.uniform(0.12 * S, 0.35 * S), std::cos(theta),
              std::sin(theta), 0, 0.0, Stripes{}};
    parts.emplace_back(s, region());
  }
  const double inv = 1.0 / (kSuper * kSuper);
  for (int y = 0; y < S; ++y)
    for (int x = 0; x < S; ++x) {
      double value = 0.0;
      for (int sy = 0; sy < kSuper; ++sy)
        for (int sx = 0; sx < kSuper; ++sx) {
          const double py = y + (sy + 0.5) / kSuper, px = x + (sx + 0.5) / kSuper;
          const Region* r = &background;
          for (const auto& [shape, reg] : parts)
            if (shape.contains(py, px)) r = &reg;
          value += (*r)(py, px) * inv;
        }
      img[y * S + x] = static_cast<T>(std::clamp(value, 0.0, 1.0));
    }
}

}  // namespace

std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::binary_shapes: return "binary_shapes";
    case TaskKind::multiclass_shapes: return "multiclass_shapes";
    case TaskKind::texture_reconstruction: return "texture_reconstruction";
  }
  return "unknown";
}

TaskKind parse_task(std::string_view s) {
  if (s == "binary" || s == "binary_shapes") return TaskKind::binary_shapes;
  if (s == "multiclass" || s == "multiclass_shapes") return TaskKind::multiclass_shapes;
  if (s == "reconstruction" || s == "texture_reconstruction")
    return TaskKind::texture_reconstruction;
  throw ConfigError("unknown task '" + std::string(s) + "'");
}

template <typename T>
ToyDataset<T> make_toy_task(const ToyTask& spec) {
  if (spec.size < 4 || spec.size % 4) throw ConfigError("toy image size must be a positive multiple of 4");
  if (spec.count < 1) throw ConfigError("toy dataset needs at least one image");
  ToyTask s = spec;
  if (s.kind == TaskKind::binary_shapes) s.classes = 2;
  if (s.kind == TaskKind::multiclass_shapes && (s.classes < 2 || s.classes > 8))
    throw ConfigError("multiclass shapes support 2..8 classes");

  ToyDataset<T> out;
  const int S = s.size;
  out.inputs = Tensor<T>({s.count, 1, S, S});
  Rng rng(s.seed);
  if (s.kind == TaskKind::texture_reconstruction) {
    for (int n = 0; n < s.count; ++n) draw_texture(s, rng, out.inputs.plane(n, 0));
    out.targets = out.inputs;
    out.classes = 0;
    return out;
  }
  out.classes = s.classes;
  out.labels.assign(static_cast<std::size_t>(s.count) * S * S, 0);
  for (int n = 0; n < s.count; ++n) {
    int* lab = out.labels.data() + static_cast<std::size_t>(n) * S * S;
    int attempt = 0;
    while (!draw_shapes(s, rng, out.inputs.plane(n, 0), lab))
      if (++attempt == 1000)
        throw ConfigError("could not place every class in a " + std::to_string(S) + "px image");
  }
  return out;
}

template ToyDataset<float> make_toy_task(const ToyTask&);
template ToyDataset<double> make_toy_task(const ToyTask&);

}  // namespace fade
