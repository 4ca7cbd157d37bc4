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

#include "fade/autograd.hpp"
#include "fade/tensor.hpp"

namespace fade {

/// Single-channel (n, 1, 2H, 2W) map with values in [0, 1], broadcast over
/// feature channels during fusion.
template <typename T>
using GateMap = Tensor<T>;

/// sigmoid(nearest_x2(conv1x1(x_de))). projector: (1, C, 1, 1) with bias.
template <typename T>
GateMap<T> generate_gate(const Tensor<T>& x_de, const ConvWeights<T>& projector);
template <typename T>
Var<T> generate_gate(const Var<T>& x_de, const ConvParams<Var<T>>& projector);

/// The G = 1 gate used when fusion degenerates to passing the encoder
/// feature through.
template <typename T>
GateMap<T> fixed_gate(const Shape& feature_shape) {
  return GateMap<T>({feature_shape.n, 1, feature_shape.h, feature_shape.w}, T(1));
}

/// f_en * G + f_up * (1 - G), G broadcast over channels.
template <typename T>
Tensor<T> fuse_gated(const Tensor<T>& f_en, const Tensor<T>& f_up,
                     const GateMap<T>& g);
template <typename T>
Var<T> fuse_gated(const Var<T>& f_en, const Var<T>& f_up, const Var<T>& g);

}  // namespace fade
