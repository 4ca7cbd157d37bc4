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
#include "fade/kernelgen.hpp"
#include "fade/tensor.hpp"

namespace fade {

struct ReassemblySpec {
  int K = 5;
  static constexpr int scale = 2;
};

/// Content-aware, channel-shared reassembly:
///   out(c, i, j) = sum_m k(m, i, j) * x_de(c, i/2 + wy(m), j/2 + wx(m))
/// with zero contribution from taps outside the decoder map. Kernel weights
/// are not renormalized at borders.
template <typename T>
Tensor<T> reassemble(const Tensor<T>& x_de, const KernelMap<T>& kernels,
                     ReassemblySpec spec);

/// Taped version; gradients flow to both the decoder feature and the
/// kernel map. The caller is responsible for normalizing the kernels.
template <typename T>
Var<T> reassemble(const Var<T>& x_de, const Var<T>& kernels, ReassemblySpec spec);

// Fixed upsamplers behind the same interface as the dynamic ones.

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x) {
  return interp_nearest_x2(x);
}
template <typename T>
Var<T> upsample_nearest(const Var<T>& x) {
  return interp_nearest_x2(x);
}

template <typename T>
Tensor<T> upsample_bilinear(const Tensor<T>& x, bool align_corners = false) {
  return interp_bilinear_x2(x, align_corners);
}
template <typename T>
Var<T> upsample_bilinear(const Var<T>& x, bool align_corners = false) {
  return interp_bilinear_x2(x, align_corners);
}

}  // namespace fade
