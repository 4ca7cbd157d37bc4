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

#include "fade/metrics.hpp"

#include <cmath>
#include <string>

namespace fade {

namespace {

void check_labels(std::span<const int> pred, std::span<const int> target, int classes) {
  if (pred.size() != target.size())
    throw ShapeError("label maps differ in size: " + std::to_string(pred.size()) + " vs " +
                     std::to_string(target.size()));
  if (classes < 1) throw ConfigError("classes must be positive");
  for (std::span<const int> s : {pred, target})
    for (int v : s)
      if (v < 0 || v >= classes)
        throw ShapeError("label " + std::to_string(v) + " outside [0, " + std::to_string(classes) + ")");
}

/// mask minus erode(mask, r), square element, outside counts as set.
std::vector<char> inner_band(const std::vector<char>& mask, int h, int w, int r) {
  std::vector<char> band(mask.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask[y * w + x]) continue;
      bool interior = true;
      for (int dy = -r; dy <= r && interior; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
          if (!mask[yy * w + xx]) {
            interior = false;
            break;
          }
        }
      band[y * w + x] = !interior;
    }
  return band;
}

}  // namespace

template <typename T>
std::vector<int> argmax_labels(const Tensor<T>& logits) {
  const Shape& s = logits.shape();
  std::vector<int> out(static_cast<std::size_t>(s.n) * s.plane());
  for (int n = 0; n < s.n; ++n)
    for (std::size_t p = 0; p < s.plane(); ++p) {
      int best = 0;
      T best_v = logits.plane(n, 0)[p];
      for (int c = 1; c < s.c; ++c)
        if (logits.plane(n, c)[p] > best_v) {
          best_v = logits.plane(n, c)[p];
          best = c;
        }
      out[n * s.plane() + p] = best;
    }
  return out;
}

double metric_miou(std::span<const int> pred, std::span<const int> target, int classes) {
  check_labels(pred, target, classes);
  std::vector<long long> inter(classes, 0), uni(classes, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == target[i]) {
      ++inter[pred[i]];
      ++uni[pred[i]];
    } else {
      ++uni[pred[i]];
      ++uni[target[i]];
    }
  }
  double acc = 0.0;
  int used = 0;
  for (int c = 0; c < classes; ++c)
    if (uni[c] > 0) {
      acc += static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
      ++used;
    }
  return used ? acc / used : 1.0;
}

template <typename T>
double metric_mse(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape() != target.shape())
    throw ShapeError("mse: " + pred.shape().str() + " vs " + target.shape().str());
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(pred.numel());
}

template <typename T>
double metric_psnr(const Tensor<T>& pred, const Tensor<T>& target, double peak) {
  const double mse = metric_mse(pred, target);
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double metric_band_iou(std::span<const int> pred, std::span<const int> target, int n, int h,
                       int w, int classes, int radius) {
  check_labels(pred, target, classes);
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  if (pred.size() != hw * n) throw ShapeError("band IoU: label count does not match n*h*w");
  if (radius < 1) throw ConfigError("band radius must be positive");
  std::vector<long long> inter(classes, 0), uni(classes, 0);
  std::vector<char> pm(hw), tm(hw);
  for (int img = 0; img < n; ++img) {
    const int* p = pred.data() + img * hw;
    const int* t = target.data() + img * hw;
    for (int c = 0; c < classes; ++c) {
      for (std::size_t i = 0; i < hw; ++i) {
        pm[i] = p[i] == c;
        tm[i] = t[i] == c;
      }
      const auto pb = inner_band(pm, h, w, radius);
      const auto tb = inner_band(tm, h, w, radius);
      for (std::size_t i = 0; i < hw; ++i) {
        if (!pb[i] && !tb[i]) continue;
        inter[c] += pm[i] && tm[i];
        uni[c] += pm[i] || tm[i];
      }
    }
  }
  double acc = 0.0;
  int used = 0;
  for (int c = 0; c < classes; ++c)
    if (uni[c] > 0) {
      acc += static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
      ++used;
    }
  return used ? acc / used : 1.0;
}

template std::vector<int> argmax_labels(const Tensor<float>&);
template std::vector<int> argmax_labels(const Tensor<double>&);
template double metric_mse(const Tensor<float>&, const Tensor<float>&);
template double metric_mse(const Tensor<double>&, const Tensor<double>&);
template double metric_psnr(const Tensor<float>&, const Tensor<float>&, double);
template double metric_psnr(const Tensor<double>&, const Tensor<double>&, double);

}  // namespace fade
