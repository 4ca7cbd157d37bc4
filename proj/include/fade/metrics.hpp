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

#include <span>
#include <vector>

#include "fade/tensor.hpp"

namespace fade {

/// Per-pixel argmax over channels, n*h*w labels in row-major order.
template <typename T>
std::vector<int> argmax_labels(const Tensor<T>& logits);

/// Mean IoU over classes that appear in pred or target. A class present in
/// pred only scores 0; classes absent from both are skipped. Returns 1 when
/// no class appears at all.
double metric_miou(std::span<const int> pred, std::span<const int> target, int classes);

template <typename T>
double metric_mse(const Tensor<T>& pred, const Tensor<T>& target);

/// 10 log10(peak^2 / mse), capped at 99 dB (also for mse = 0).
template <typename T>
double metric_psnr(const Tensor<T>& pred, const Tensor<T>& target, double peak = 1.0);

inline constexpr double kPsnrCap = 99.0;

/// Boundary-band IoU: per class, IoU restricted to the union of the inner
/// bands (mask minus its erosion by a (2r+1)^2 square) of the class in pred
/// and target, averaged over classes with a non-empty band union. Pixels
/// outside the image count as inside the mask, so the frame is not a
/// boundary. A band approximation, not an exact boundary IoU.
/// Labels are n images of h x w.
double metric_band_iou(std::span<const int> pred, std::span<const int> target, int n, int h,
                       int w, int classes, int radius);

}  // namespace fade
