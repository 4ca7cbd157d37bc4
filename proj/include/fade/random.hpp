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
#include <random>

#include "fade/tensor.hpp"

namespace fade {

/// The one generator every seeded computation draws from: a 64-bit
/// linear-congruential engine (a = 6364136223846793005,
/// c = 1442695040888963407, modulus 2^64) behind a 32-slot Bays-Durham
/// shuffle table. Both stages are fully specified by the C++ standard, so
/// the stream is identical on every conforming implementation.
class Rng {
 public:
  using Lcg = std::linear_congruential_engine<std::uint64_t,
                                              6364136223846793005ULL,
                                              1442695040888963407ULL, 0ULL>;
  using Engine = std::shuffle_order_engine<Lcg, 32>;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Top 53 bits scaled to [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [0, bound), by rejection so every value is equally likely.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal by Box-Muller (one draw per call, second discarded).
  double normal();

  /// Derive an independent child seed (stream splitting for sub-tasks).
  std::uint64_t split() { return next_u64() ^ 0x9E3779B97F4A7C15ULL; }

 private:
  Engine engine_;
};

/// Fill with U(-bound, bound), bound = sqrt(6 / fan_in).
template <typename T>
void init_uniform_fan_in(Tensor<T>& t, int fan_in, Rng& rng);

template <typename T>
Tensor<T> random_tensor(Shape s, Rng& rng, double lo = -1.0, double hi = 1.0);

}  // namespace fade
