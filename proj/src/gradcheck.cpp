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

#include "fade/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "fade/random.hpp"

namespace fade {

namespace {

double loss_at(const OpUnderTest& op, const std::vector<Tensor<double>>& inputs,
               const Tensor<double>& probe) {
  Tape<double> tape;
  std::vector<Var<double>> leaves;
  leaves.reserve(inputs.size());
  for (const auto& x : inputs) leaves.push_back(tape.constant(x));
  const Tensor<double> out = op(tape, leaves).value();
  double acc = 0.0;
  for (std::size_t i = 0; i < out.numel(); ++i) acc += out[i] * probe[i];
  return acc;
}

}  // namespace

GradcheckResult gradcheck(const OpUnderTest& op, std::vector<Tensor<double>> inputs,
                          std::uint64_t seed, double eps) {
  Tape<double> tape;
  std::vector<Var<double>> leaves;
  for (const auto& x : inputs) leaves.push_back(tape.leaf(x));
  const Var<double> out = op(tape, leaves);
  Rng rng(seed);
  const Tensor<double> probe = random_tensor<double>(out.shape(), rng);
  tape.backward(weighted_sum(out, probe));

  GradcheckResult r;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Tensor<double> analytic = tape.grad(leaves[k]);
    for (std::size_t i = 0; i < inputs[k].numel(); ++i) {
      const double x0 = inputs[k][i];
      inputs[k][i] = x0 + eps;
      const double fp = loss_at(op, inputs, probe);
      inputs[k][i] = x0 - eps;
      const double fm = loss_at(op, inputs, probe);
      inputs[k][i] = x0;
      const double numeric = (fp - fm) / (2.0 * eps);
      const double a = analytic[i];
      const double err =
          std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      if (!(err <= r.max_rel_error)) {
        r.max_rel_error = err;
        r.worst_input = k;
        r.worst_index = i;
      }
      ++r.coordinates;
    }
  }
  return r;
}

}  // namespace fade
