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

#include "fade/random.hpp"

#include <cmath>
#include <numbers>

namespace fade {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw ConfigError("Rng::below: bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename T>
void init_uniform_fan_in(Tensor<T>& t, int fan_in, Rng& rng) {
  if (fan_in < 1) throw ConfigError("init: fan_in must be positive");
  const double bound = std::sqrt(6.0 / fan_in);
  for (auto& v : t.data()) v = static_cast<T>(rng.uniform(-bound, bound));
}

template <typename T>
Tensor<T> random_tensor(Shape s, Rng& rng, double lo, double hi) {
  Tensor<T> t(s);
  for (auto& v : t.data()) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

template void init_uniform_fan_in(Tensor<float>&, int, Rng&);
template void init_uniform_fan_in(Tensor<double>&, int, Rng&);
template Tensor<float> random_tensor(Shape, Rng&, double, double);
template Tensor<double> random_tensor(Shape, Rng&, double, double);

}  // namespace fade
