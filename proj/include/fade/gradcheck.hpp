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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fade/autograd.hpp"

namespace fade {

struct GradcheckResult {
  /// max over coordinates of |analytic - numeric| / max(1, |analytic|, |numeric|)
  double max_rel_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
};

/// Maps leaves (one per input tensor, same order) to the op's output.
using OpUnderTest =
    std::function<Var<double>(Tape<double>&, std::span<const Var<double>>)>;

/// Central differences (f(x+eps) - f(x-eps)) / 2eps on every coordinate of
/// every input, against reverse-mode gradients of the scalar
/// sum(op(inputs) * probe) with a fixed random probe drawn from `seed`.
GradcheckResult gradcheck(const OpUnderTest& op, std::vector<Tensor<double>> inputs,
                          std::uint64_t seed, double eps = 1e-5);

}  // namespace fade
