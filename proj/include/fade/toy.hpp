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
#include <string_view>
#include <vector>

#include "fade/tensor.hpp"

namespace fade {

enum class TaskKind { binary_shapes, multiclass_shapes, texture_reconstruction };

std::string_view to_string(TaskKind k);
/// Accepts "binary", "multiclass", "reconstruction" and the full names.
TaskKind parse_task(std::string_view s);

struct ToyTask {
  TaskKind kind = TaskKind::binary_shapes;
  int size = 32;
  /// Ignored for reconstruction; forced to 2 for binary shapes.
  int classes = 2;
  int count = 64;
  std::uint64_t seed = 0;
};

/// Single-channel images in [0, 1].
template <typename T>
struct ToyDataset {
  Tensor<T> inputs;
  /// Segmentation: n*h*w labels in [0, classes). Empty for reconstruction.
  std::vector<int> labels;
  /// Reconstruction target (equal to inputs). Unused for segmentation.
  Tensor<T> targets;
  int classes = 0;

  bool segmentation() const { return !labels.empty(); }
};

/// Shapes: anti-aliased rectangles and ellipses (4x4 supersampled
/// coverage) with striped fill over a striped, noisy background; a pixel's
/// label is the class covering at least half of it. Every image contains
/// every class (regenerated otherwise). Reconstruction: a textured
/// background with two or three overlapping shapes, each region carrying
/// its own brightness and a low-amplitude stripe or checker texture.
template <typename T>
ToyDataset<T> make_toy_task(const ToyTask& spec);

}  // namespace fade
