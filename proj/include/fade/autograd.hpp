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
#include <deque>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "fade/tensor.hpp"

namespace fade {

template <typename T>
class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while its tape
/// is alive and has not been cleared.
template <typename T>
class Var {
 public:
  using value_type = T;

  Var() = default;

  const Tensor<T>& value() const;
  const Shape& shape() const { return value().shape(); }
  Tape<T>& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape<T>;
  Var(Tape<T>* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape<T>* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Records a forward computation and replays it in reverse.
///
/// Nodes are appended in evaluation order, so reverse creation order is a
/// valid reverse topological order. Node values double as the saved
/// activations backward closures read. Gradients accumulate additively
/// within a pass; each call to backward() starts from zeroed gradients, so
/// repeated passes over the same recording give identical results.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor<T>& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> leaf(Tensor<T> value, bool requires_grad = true);
  Var<T> constant(Tensor<T> value) { return leaf(std::move(value), false); }

  /// Append an op result. `fn` is dropped when no input requires a
  /// gradient.
  Var<T> record(Tensor<T> value, std::initializer_list<Var<T>> inputs,
                BackwardFn fn);

  const Tensor<T>& value(std::size_t id) const { return nodes_.at(id).value; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  bool requires_grad(const Var<T>& v) const { return requires_grad(v.id()); }

  /// grad[id] += g (no-op when the node does not require a gradient).
  void accumulate(std::size_t id, const Tensor<T>& g);
  /// Zero-initialized gradient buffer of node id, for scatter-add kernels.
  Tensor<T>& grad_buffer(std::size_t id);

  /// Reverse pass from a single-element loss. Throws TapeError when nothing
  /// was recorded, the loss is not a scalar, or a leaf was overwritten via
  /// set_value() after a consumer was recorded.
  void backward(const Var<T>& loss);

  bool has_grad(const Var<T>& v) const;
  /// Gradient of v from the last backward pass (zeros when none flowed).
  Tensor<T> grad(const Var<T>& v) const;

  void zero_grad();
  void clear();
  std::size_t size() const { return nodes_.size(); }

  /// Overwrite a leaf's value. Any op recorded from the old value becomes
  /// stale and backward() will refuse to run through it.
  void set_value(const Var<T>& leaf, Tensor<T> value);

 private:
  struct Node {
    Tensor<T> value;
    std::optional<Tensor<T>> grad;
    std::vector<std::size_t> inputs;
    std::vector<std::uint64_t> input_versions;
    BackwardFn backward;
    bool requires_grad = false;
    bool is_leaf = false;
    std::uint64_t version = 0;
  };

  std::deque<Node> nodes_;
};

template <typename T>
const Tensor<T>& Var<T>::value() const {
  if (!tape_) throw TapeError("use of an unbound Var");
  return tape_->value(id_);
}

// Differentiable counterparts of the tensor primitives. Each records one
// node; all inputs must live on the same tape.

template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const std::type_identity_t<Var<T>>* bias,
              int stride, PadSpec pad);
template <typename T>
Var<T> conv2d_depthwise(const Var<T>& x, const Var<T>& weight,
                        const std::type_identity_t<Var<T>>* bias, int stride, PadSpec pad);
template <typename T>
Var<T> conv1x1(const Var<T>& x, const Var<T>& weight, const std::type_identity_t<Var<T>>* bias);
template <typename T>
Var<T> interp_nearest_x2(const Var<T>& x);
template <typename T>
Var<T> interp_bilinear_x2(const Var<T>& x, bool align_corners = false);
template <typename T>
Var<T> maxpool2x2(const Var<T>& x);
template <typename T>
Var<T> softmax_channel(const Var<T>& x);
template <typename T>
Var<T> sigmoid(const Var<T>& x);
template <typename T>
Var<T> relu(const Var<T>& x);
template <typename T>
Var<T> pixel_shuffle_x2(const Var<T>& x);
template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> scale(const Var<T>& a, T s);
template <typename T>
Var<T> concat_channels(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> interleave_phases(const Var<T>& p00, const Var<T>& p01,
                         const Var<T>& p10, const Var<T>& p11);

// Scalar reductions and losses (results have shape 1x1x1x1).

template <typename T>
Var<T> sum(const Var<T>& x);
/// sum_i x_i * probe_i; a fixed random probe turns any op into a scalar
/// with a non-degenerate gradient.
template <typename T>
Var<T> weighted_sum(const Var<T>& x, const Tensor<T>& probe);
/// mean((pred - target)^2)
template <typename T>
Var<T> mse_loss(const Var<T>& pred, const Tensor<T>& target);
/// Mean per-pixel softmax cross-entropy. labels: n*h*w class indices in
/// row-major order.
template <typename T>
Var<T> softmax_cross_entropy(const Var<T>& logits, std::span<const int> labels);

}  // namespace fade
