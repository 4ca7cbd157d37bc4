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

#include "fade/optim.hpp"

#include <string>

namespace fade {

template <typename T>
Sgd<T>::Sgd(double lr, double momentum) : lr_(lr), momentum_(momentum) {
  set_lr(lr);
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw ConfigError("momentum must lie in [0, 1), got " + std::to_string(momentum));
}

template <typename T>
void Sgd<T>::set_lr(double lr) {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive, got " + std::to_string(lr));
  lr_ = lr;
}

template <typename T>
void Sgd<T>::step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>> grads) {
  if (params.size() != grads.size())
    throw ConfigError("sgd: " + std::to_string(params.size()) + " parameters but " +
                      std::to_string(grads.size()) + " gradients");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->shape() != grads[i].shape())
      throw ShapeError("sgd: gradient " + std::to_string(i) + " has shape " +
                       grads[i].shape().str() + ", parameter " + params[i]->shape().str());
    if (!grads[i].all_finite())
      throw NumericError("sgd: non-finite gradient for parameter " + std::to_string(i));
  }
  if (velocity_.empty()) {
    for (const auto& g : grads) velocity_.emplace_back(g.shape());
  } else if (velocity_.size() != params.size()) {
    throw ConfigError("sgd: parameter list changed between steps");
  }
  const T mu = static_cast<T>(momentum_), lr = static_cast<T>(lr_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto v = velocity_[i].data();
    auto g = grads[i].data();
    auto p = params[i]->data();
    if (v.size() != g.size()) throw ConfigError("sgd: parameter list changed between steps");
    for (std::size_t j = 0; j < p.size(); ++j) {
      v[j] = mu * v[j] + g[j];
      p[j] -= lr * v[j];
    }
  }
}

template class Sgd<float>;
template class Sgd<double>;

}  // namespace fade
