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

#include "fade/autograd.hpp"

#include <algorithm>
#include <cmath>

#include "conv_kernels.hpp"

namespace fade {

// ---------------------------------------------------------------- Tape

template <typename T>
Var<T> Tape<T>::leaf(Tensor<T> value, bool requires_grad) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  node.is_leaf = true;
  nodes_.push_back(std::move(node));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, std::initializer_list<Var<T>> inputs,
                       BackwardFn fn) {
  Node node;
  node.value = std::move(value);
  for (const auto& in : inputs) {
    if (&in.tape() != this)
      throw TapeError("op inputs must be recorded on the same tape");
    node.inputs.push_back(in.id());
    node.input_versions.push_back(nodes_.at(in.id()).version);
    node.requires_grad = node.requires_grad || nodes_[in.id()].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
void Tape<T>::accumulate(std::size_t id, const Tensor<T>& g) {
  Node& node = nodes_.at(id);
  if (!node.requires_grad) return;
  if (!node.grad) {
    node.grad = g;
    return;
  }
  if (node.grad->shape() != g.shape())
    throw TapeError("gradient shape mismatch at node " + std::to_string(id));
  auto dst = node.grad->data();
  auto src = g.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

template <typename T>
Tensor<T>& Tape<T>::grad_buffer(std::size_t id) {
  Node& node = nodes_.at(id);
  if (!node.grad) node.grad = Tensor<T>(node.value.shape());
  return *node.grad;
}

template <typename T>
void Tape<T>::backward(const Var<T>& loss) {
  if (nodes_.empty() || !loss.valid())
    throw TapeError("backward called before any forward pass was recorded");
  if (&loss.tape() != this || loss.id() >= nodes_.size())
    throw TapeError("loss does not belong to this tape");
  if (nodes_[loss.id()].value.numel() != 1)
    throw TapeError("backward requires a single-element loss, got " +
                    nodes_[loss.id()].value.shape().str());
  for (std::size_t id = 0; id <= loss.id(); ++id) {
    const Node& node = nodes_[id];
    for (std::size_t k = 0; k < node.inputs.size(); ++k)
      if (nodes_[node.inputs[k]].version != node.input_versions[k])
        throw TapeError("graph mutated between forward and backward: input " +
                        std::to_string(node.inputs[k]) + " of node " +
                        std::to_string(id) + " was overwritten");
  }
  zero_grad();
  if (!nodes_[loss.id()].requires_grad) return;
  nodes_[loss.id()].grad = Tensor<T>(nodes_[loss.id()].value.shape(), T(1));
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.grad || !node.backward) continue;
    node.backward(*this, *node.grad);
  }
}

template <typename T>
bool Tape<T>::has_grad(const Var<T>& v) const {
  return nodes_.at(v.id()).grad.has_value();
}

template <typename T>
Tensor<T> Tape<T>::grad(const Var<T>& v) const {
  const Node& node = nodes_.at(v.id());
  return node.grad ? *node.grad : Tensor<T>(node.value.shape());
}

template <typename T>
void Tape<T>::zero_grad() {
  for (auto& node : nodes_) node.grad.reset();
}

template <typename T>
void Tape<T>::clear() {
  nodes_.clear();
}

template <typename T>
void Tape<T>::set_value(const Var<T>& leaf, Tensor<T> value) {
  Node& node = nodes_.at(leaf.id());
  if (!node.is_leaf) throw TapeError("set_value: only leaves can be overwritten");
  if (node.value.shape() != value.shape())
    throw TapeError("set_value: shape change not allowed");
  node.value = std::move(value);
  ++node.version;
}

// ---------------------------------------------------------------- ops

namespace {

template <typename T>
void check_bias(const Var<T>* bias, int out) {
  if (bias && bias->value().numel() != static_cast<std::size_t>(out))
    throw ShapeError("bias length does not match out_channels");
}

}  // namespace

template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const std::type_identity_t<Var<T>>* bias,
              int stride, PadSpec pad) {
  Tape<T>& tape = x.tape();
  auto out = conv2d(x.value(), weight.value(), bias ? &bias->value() : nullptr,
                    stride, pad);
  const std::size_t xi = x.id(), wi = weight.id();
  const std::optional<std::size_t> bi =
      bias ? std::optional<std::size_t>(bias->id()) : std::nullopt;
  auto fn = [xi, wi, bi, stride, pad](Tape<T>& t, const Tensor<T>& g) {
    const Tensor<T>& xv = t.value(xi);
    const Tensor<T>& wv = t.value(wi);
    const Shape& ws = wv.shape();
    const auto geo = detail::make_geometry(xv.shape(), ws.h, ws.w, stride, pad);
    if (t.requires_grad(xi)) {
      Tensor<T>& gx = t.grad_buffer(xi);
      for (int n = 0; n < xv.n(); ++n)
        for (int o = 0; o < ws.n; ++o)
          for (int i = 0; i < ws.c; ++i)
            for (int ky = 0; ky < ws.h; ++ky)
              for (int kx = 0; kx < ws.w; ++kx)
                detail::tap_backward_input(gx.plane(n, i), g.plane(n, o), geo,
                                           ky, kx, wv.at(o, i, ky, kx));
    }
    if (t.requires_grad(wi)) {
      Tensor<T>& gw = t.grad_buffer(wi);
      for (int o = 0; o < ws.n; ++o)
        for (int i = 0; i < ws.c; ++i)
          for (int ky = 0; ky < ws.h; ++ky)
            for (int kx = 0; kx < ws.w; ++kx) {
              T acc = 0;
              for (int n = 0; n < xv.n(); ++n)
                acc += detail::tap_dot(g.plane(n, o), xv.plane(n, i), geo, ky, kx);
              gw.at(o, i, ky, kx) += acc;
            }
    }
    if (bi && t.requires_grad(*bi)) {
      Tensor<T>& gb = t.grad_buffer(*bi);
      const std::size_t hw = g.shape().plane();
      for (int o = 0; o < ws.n; ++o) {
        T acc = 0;
        for (int n = 0; n < g.n(); ++n) {
          const T* gp = g.plane(n, o);
          for (std::size_t p = 0; p < hw; ++p) acc += gp[p];
        }
        gb[o] += acc;
      }
    }
  };
  if (bias) return tape.record(std::move(out), {x, weight, *bias}, fn);
  return tape.record(std::move(out), {x, weight}, fn);
}

template <typename T>
Var<T> conv2d_depthwise(const Var<T>& x, const Var<T>& weight,
                        const std::type_identity_t<Var<T>>* bias, int stride, PadSpec pad) {
  Tape<T>& tape = x.tape();
  auto out = conv2d_depthwise(x.value(), weight.value(),
                              bias ? &bias->value() : nullptr, stride, pad);
  const std::size_t xi = x.id(), wi = weight.id();
  const std::optional<std::size_t> bi =
      bias ? std::optional<std::size_t>(bias->id()) : std::nullopt;
  auto fn = [xi, wi, bi, stride, pad](Tape<T>& t, const Tensor<T>& g) {
    const Tensor<T>& xv = t.value(xi);
    const Tensor<T>& wv = t.value(wi);
    const Shape& ws = wv.shape();
    const auto geo = detail::make_geometry(xv.shape(), ws.h, ws.w, stride, pad);
    if (t.requires_grad(xi)) {
      Tensor<T>& gx = t.grad_buffer(xi);
      for (int n = 0; n < xv.n(); ++n)
        for (int c = 0; c < xv.c(); ++c)
          for (int ky = 0; ky < ws.h; ++ky)
            for (int kx = 0; kx < ws.w; ++kx)
              detail::tap_backward_input(gx.plane(n, c), g.plane(n, c), geo, ky,
                                         kx, wv.at(c, 0, ky, kx));
    }
    if (t.requires_grad(wi)) {
      Tensor<T>& gw = t.grad_buffer(wi);
      for (int c = 0; c < xv.c(); ++c)
        for (int ky = 0; ky < ws.h; ++ky)
          for (int kx = 0; kx < ws.w; ++kx) {
            T acc = 0;
            for (int n = 0; n < xv.n(); ++n)
              acc += detail::tap_dot(g.plane(n, c), xv.plane(n, c), geo, ky, kx);
            gw.at(c, 0, ky, kx) += acc;
          }
    }
    if (bi && t.requires_grad(*bi)) {
      Tensor<T>& gb = t.grad_buffer(*bi);
      const std::size_t hw = g.shape().plane();
      for (int c = 0; c < g.c(); ++c) {
        T acc = 0;
        for (int n = 0; n < g.n(); ++n) {
          const T* gp = g.plane(n, c);
          for (std::size_t p = 0; p < hw; ++p) acc += gp[p];
        }
        gb[c] += acc;
      }
    }
  };
  if (bias) return tape.record(std::move(out), {x, weight, *bias}, fn);
  return tape.record(std::move(out), {x, weight}, fn);
}

template <typename T>
Var<T> conv1x1(const Var<T>& x, const Var<T>& weight, const std::type_identity_t<Var<T>>* bias) {
  if (weight.shape().h != 1 || weight.shape().w != 1)
    throw ShapeError("conv1x1: kernel must be 1x1, got " + weight.shape().str());
  return conv2d(x, weight, bias, 1, PadSpec{});
}

template <typename T>
Var<T> interp_nearest_x2(const Var<T>& x) {
  const std::size_t xi = x.id();
  return x.tape().record(
      interp_nearest_x2(x.value()), {x}, [xi](Tape<T>& t, const Tensor<T>& g) {
        Tensor<T>& gx = t.grad_buffer(xi);
        for (int n = 0; n < gx.n(); ++n)
          for (int c = 0; c < gx.c(); ++c)
            for (int y = 0; y < g.h(); ++y)
              for (int xx = 0; xx < g.w(); ++xx)
                gx.at(n, c, y / 2, xx / 2) += g.at(n, c, y, xx);
      });
}

template <typename T>
Var<T> interp_bilinear_x2(const Var<T>& x, bool align_corners) {
  const std::size_t xi = x.id();
  return x.tape().record(
      interp_bilinear_x2(x.value(), align_corners), {x},
      [xi, align_corners](Tape<T>& t, const Tensor<T>& g) {
        Tensor<T>& gx = t.grad_buffer(xi);
        const int h = gx.h(), w = gx.w();
        // Same sampling positions as the forward kernel.
        auto tap = [align_corners](int dst, int in) {
          double src = align_corners
                           ? (2 * in > 1 ? dst * double(in - 1) / (2 * in - 1) : 0.0)
                           : std::max(0.0, (dst + 0.5) / 2.0 - 0.5);
          int i0 = std::min(static_cast<int>(std::floor(src)), in - 1);
          return std::tuple{i0, std::min(i0 + 1, in - 1), static_cast<T>(src - i0)};
        };
        for (int i = 0; i < 2 * h; ++i) {
          const auto [y0, y1, fy] = tap(i, h);
          for (int j = 0; j < 2 * w; ++j) {
            const auto [x0, x1, fx] = tap(j, w);
            for (int n = 0; n < gx.n(); ++n)
              for (int c = 0; c < gx.c(); ++c) {
                const T go = g.at(n, c, i, j);
                gx.at(n, c, y0, x0) += go * (1 - fy) * (1 - fx);
                gx.at(n, c, y0, x1) += go * (1 - fy) * fx;
                gx.at(n, c, y1, x0) += go * fy * (1 - fx);
                gx.at(n, c, y1, x1) += go * fy * fx;
              }
          }
        }
      });
}

template <typename T>
Var<T> maxpool2x2(const Var<T>& x) {
  const std::size_t xi = x.id();
  return x.tape().record(
      maxpool2x2(x.value()), {x}, [xi](Tape<T>& t, const Tensor<T>& g) {
        const Tensor<T>& xv = t.value(xi);
        Tensor<T>& gx = t.grad_buffer(xi);
        for (int n = 0; n < g.n(); ++n)
          for (int c = 0; c < g.c(); ++c)
            for (int y = 0; y < g.h(); ++y)
              for (int xx = 0; xx < g.w(); ++xx) {
                // Ties go to the first maximal element in row-major order.
                int by = 2 * y, bx = 2 * xx;
                T best = xv.at(n, c, by, bx);
                for (int k = 1; k < 4; ++k) {
                  const int yy = 2 * y + k / 2, xc = 2 * xx + k % 2;
                  if (best < xv.at(n, c, yy, xc)) {
                    best = xv.at(n, c, yy, xc);
                    by = yy;
                    bx = xc;
                  }
                }
                gx.at(n, c, by, bx) += g.at(n, c, y, xx);
              }
      });
}

template <typename T>
Var<T> softmax_channel(const Var<T>& x) {
  const std::size_t xi = x.id();
  Tape<T>& tape = x.tape();
  auto y = softmax_channel(x.value());
  // The closure reads the output through its own node id, assigned next.
  const std::size_t yi = tape.size();
  return tape.record(std::move(y), {x}, [xi, yi](Tape<T>& t, const Tensor<T>& g) {
    const Tensor<T>& yv = t.value(yi);
    Tensor<T>& gx = t.grad_buffer(xi);
    const Shape& s = yv.shape();
    const std::size_t hw = s.plane();
    std::vector<T> dot(hw);
    for (int n = 0; n < s.n; ++n) {
      std::fill(dot.begin(), dot.end(), T(0));
      for (int c = 0; c < s.c; ++c) {
        const T* yp = yv.plane(n, c);
        const T* gp = g.plane(n, c);
        for (std::size_t p = 0; p < hw; ++p) dot[p] += yp[p] * gp[p];
      }
      for (int c = 0; c < s.c; ++c) {
        const T* yp = yv.plane(n, c);
        const T* gp = g.plane(n, c);
        T* dp = gx.plane(n, c);
        for (std::size_t p = 0; p < hw; ++p) dp[p] += yp[p] * (gp[p] - dot[p]);
      }
    }
  });
}

template <typename T>
Var<T> sigmoid(const Var<T>& x) {
  const std::size_t xi = x.id();
  Tape<T>& tape = x.tape();
  const std::size_t yi = tape.size();
  return tape.record(sigmoid(x.value()), {x},
                     [xi, yi](Tape<T>& t, const Tensor<T>& g) {
                       const Tensor<T>& yv = t.value(yi);
                       Tensor<T>& gx = t.grad_buffer(xi);
                       for (std::size_t i = 0; i < g.numel(); ++i)
                         gx[i] += g[i] * yv[i] * (T(1) - yv[i]);
                     });
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  const std::size_t xi = x.id();
  return x.tape().record(relu(x.value()), {x},
                         [xi](Tape<T>& t, const Tensor<T>& g) {
                           const Tensor<T>& xv = t.value(xi);
                           Tensor<T>& gx = t.grad_buffer(xi);
                           for (std::size_t i = 0; i < g.numel(); ++i)
                             if (xv[i] > 0) gx[i] += g[i];
                         });
}

template <typename T>
Var<T> pixel_shuffle_x2(const Var<T>& x) {
  const std::size_t xi = x.id();
  return x.tape().record(pixel_shuffle_x2(x.value()), {x},
                         [xi](Tape<T>& t, const Tensor<T>& g) {
                           t.accumulate(xi, pixel_unshuffle_x2(g));
                         });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  const std::size_t ai = a.id(), bi = b.id();
  return a.tape().record(add(a.value(), b.value()), {a, b},
                         [ai, bi](Tape<T>& t, const Tensor<T>& g) {
                           t.accumulate(ai, g);
                           t.accumulate(bi, g);
                         });
}

template <typename T>
Var<T> scale(const Var<T>& a, T s) {
  const std::size_t ai = a.id();
  return a.tape().record(scale(a.value(), s), {a},
                         [ai, s](Tape<T>& t, const Tensor<T>& g) {
                           t.accumulate(ai, scale(g, s));
                         });
}

template <typename T>
Var<T> concat_channels(const Var<T>& a, const Var<T>& b) {
  const std::size_t ai = a.id(), bi = b.id();
  const int ca = a.shape().c;
  return a.tape().record(
      concat_channels(a.value(), b.value()), {a, b},
      [ai, bi, ca](Tape<T>& t, const Tensor<T>& g) {
        const Shape& s = g.shape();
        const std::size_t hw = s.plane();
        if (t.requires_grad(ai)) {
          Tensor<T>& ga = t.grad_buffer(ai);
          for (int n = 0; n < s.n; ++n)
            for (std::size_t k = 0; k < ca * hw; ++k)
              ga.plane(n, 0)[k] += g.plane(n, 0)[k];
        }
        if (t.requires_grad(bi)) {
          Tensor<T>& gb = t.grad_buffer(bi);
          for (int n = 0; n < s.n; ++n)
            for (std::size_t k = 0; k < (s.c - ca) * hw; ++k)
              gb.plane(n, 0)[k] += g.plane(n, ca)[k];
        }
      });
}

template <typename T>
Var<T> interleave_phases(const Var<T>& p00, const Var<T>& p01,
                         const Var<T>& p10, const Var<T>& p11) {
  const std::size_t ids[4] = {p00.id(), p01.id(), p10.id(), p11.id()};
  return p00.tape().record(
      interleave_phases(p00.value(), p01.value(), p10.value(), p11.value()),
      {p00, p01, p10, p11},
      [i0 = ids[0], i1 = ids[1], i2 = ids[2], i3 = ids[3]](Tape<T>& t,
                                                           const Tensor<T>& g) {
        const std::size_t ids[4] = {i0, i1, i2, i3};
        for (int p = 0; p < 4; ++p)
          if (t.requires_grad(ids[p]))
            t.accumulate(ids[p], extract_phase(g, p / 2, p % 2));
      });
}

template <typename T>
Var<T> sum(const Var<T>& x) {
  T acc = 0;
  for (T v : x.value().data()) acc += v;
  const std::size_t xi = x.id();
  return x.tape().record(Tensor<T>(Shape{}, acc), {x},
                         [xi](Tape<T>& t, const Tensor<T>& g) {
                           Tensor<T>& gx = t.grad_buffer(xi);
                           for (auto& v : gx.data()) v += g[0];
                         });
}

template <typename T>
Var<T> weighted_sum(const Var<T>& x, const Tensor<T>& probe) {
  if (probe.shape() != x.shape())
    throw ShapeError("weighted_sum: probe shape mismatch");
  T acc = 0;
  for (std::size_t i = 0; i < probe.numel(); ++i) acc += x.value()[i] * probe[i];
  const std::size_t xi = x.id();
  return x.tape().record(Tensor<T>(Shape{}, acc), {x},
                         [xi, probe](Tape<T>& t, const Tensor<T>& g) {
                           Tensor<T>& gx = t.grad_buffer(xi);
                           for (std::size_t i = 0; i < gx.numel(); ++i)
                             gx[i] += g[0] * probe[i];
                         });
}

template <typename T>
Var<T> mse_loss(const Var<T>& pred, const Tensor<T>& target) {
  if (target.shape() != pred.shape())
    throw ShapeError("mse_loss: target shape " + target.shape().str() +
                     " does not match prediction " + pred.shape().str());
  const Tensor<T>& pv = pred.value();
  T acc = 0;
  for (std::size_t i = 0; i < pv.numel(); ++i) {
    const T d = pv[i] - target[i];
    acc += d * d;
  }
  const T inv_n = T(1) / static_cast<T>(pv.numel());
  const std::size_t pi = pred.id();
  return pred.tape().record(
      Tensor<T>(Shape{}, acc * inv_n), {pred},
      [pi, target, inv_n](Tape<T>& t, const Tensor<T>& g) {
        const Tensor<T>& pv = t.value(pi);
        Tensor<T>& gp = t.grad_buffer(pi);
        for (std::size_t i = 0; i < gp.numel(); ++i)
          gp[i] += g[0] * T(2) * (pv[i] - target[i]) * inv_n;
      });
}

template <typename T>
Var<T> softmax_cross_entropy(const Var<T>& logits, std::span<const int> labels) {
  const Shape& s = logits.shape();
  const std::size_t hw = s.plane();
  if (labels.size() != static_cast<std::size_t>(s.n) * hw)
    throw ShapeError("softmax_cross_entropy: expected " +
                     std::to_string(static_cast<std::size_t>(s.n) * hw) +
                     " labels, got " + std::to_string(labels.size()));
  for (int l : labels)
    if (l < 0 || l >= s.c)
      throw ShapeError("softmax_cross_entropy: label out of range");
  auto prob = softmax_channel(logits.value());
  T acc = 0;
  for (int n = 0; n < s.n; ++n)
    for (std::size_t p = 0; p < hw; ++p) {
      const int l = labels[n * hw + p];
      // log-softmax via the max-shifted logits keeps this finite.
      T mx = logits.value().plane(n, 0)[p];
      for (int c = 1; c < s.c; ++c) mx = std::max(mx, logits.value().plane(n, c)[p]);
      T se = 0;
      for (int c = 0; c < s.c; ++c) se += std::exp(logits.value().plane(n, c)[p] - mx);
      acc -= logits.value().plane(n, l)[p] - mx - std::log(se);
    }
  const T inv_n = T(1) / static_cast<T>(static_cast<std::size_t>(s.n) * hw);
  std::vector<int> lab(labels.begin(), labels.end());
  const std::size_t li = logits.id();
  return logits.tape().record(
      Tensor<T>(Shape{}, acc * inv_n), {logits},
      [li, prob = std::move(prob), lab = std::move(lab), inv_n](
          Tape<T>& t, const Tensor<T>& g) {
        Tensor<T>& gl = t.grad_buffer(li);
        const Shape& s = prob.shape();
        const std::size_t hw = s.plane();
        for (int n = 0; n < s.n; ++n)
          for (int c = 0; c < s.c; ++c) {
            const T* pp = prob.plane(n, c);
            T* gp = gl.plane(n, c);
            for (std::size_t p = 0; p < hw; ++p) {
              const T onehot = lab[n * hw + p] == c ? T(1) : T(0);
              gp[p] += g[0] * (pp[p] - onehot) * inv_n;
            }
          }
      });
}

#define FADE_INSTANTIATE(T)                                                   \
  template class Tape<T>;                                                     \
  template Var<T> conv2d(const Var<T>&, const Var<T>&, const Var<T>*, int,    \
                         PadSpec);                                            \
  template Var<T> conv2d_depthwise(const Var<T>&, const Var<T>&,              \
                                   const Var<T>*, int, PadSpec);              \
  template Var<T> conv1x1(const Var<T>&, const Var<T>&, const Var<T>*);       \
  template Var<T> interp_nearest_x2(const Var<T>&);                           \
  template Var<T> interp_bilinear_x2(const Var<T>&, bool);                    \
  template Var<T> maxpool2x2(const Var<T>&);                                  \
  template Var<T> softmax_channel(const Var<T>&);                             \
  template Var<T> sigmoid(const Var<T>&);                                     \
  template Var<T> relu(const Var<T>&);                                        \
  template Var<T> pixel_shuffle_x2(const Var<T>&);                            \
  template Var<T> add(const Var<T>&, const Var<T>&);                          \
  template Var<T> scale(const Var<T>&, T);                                    \
  template Var<T> concat_channels(const Var<T>&, const Var<T>&);              \
  template Var<T> interleave_phases(const Var<T>&, const Var<T>&,             \
                                    const Var<T>&, const Var<T>&);            \
  template Var<T> sum(const Var<T>&);                                         \
  template Var<T> weighted_sum(const Var<T>&, const Tensor<T>&);              \
  template Var<T> mse_loss(const Var<T>&, const Tensor<T>&);                  \
  template Var<T> softmax_cross_entropy(const Var<T>&, std::span<const int>);

FADE_INSTANTIATE(float)
FADE_INSTANTIATE(double)

}  // namespace fade
