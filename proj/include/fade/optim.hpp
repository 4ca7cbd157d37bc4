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

/// Classical momentum: v <- momentum * v + g; p <- p - lr * v.
template <typename T>
class Sgd {
 public:
  /// Throws ConfigError unless lr > 0 and 0 <= momentum < 1.
  Sgd(double lr, double momentum = 0.0);

  /// params[i] is updated with grads[i]. Velocity buffers are created on
  /// the first step; later calls must pass the same shapes in the same
  /// order. Throws NumericError, leaving every parameter untouched, when
  /// any gradient is non-finite.
  void step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>> grads);

  double lr() const { return lr_; }
  void set_lr(double lr);

 private:
  double lr_;
  double momentum_;
  std::vector<Tensor<T>> velocity_;
};

}  // namespace fade
