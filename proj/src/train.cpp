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

#include "fade/train.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "fade/metrics.hpp"
#include "fade/optim.hpp"
#include "fade/random.hpp"

namespace fade {

namespace {

constexpr PadSpec kSame = {1, 1, 1, 1};

template <typename T>
ConvWeights<T> he_conv(int out, int in, int k, Rng& rng) {
  ConvWeights<T> p{Tensor<T>({out, in, k, k}), Tensor<T>({1, out, 1, 1})};
  init_uniform_fan_in(p.weight, in * k * k, rng);
  return p;
}

/// Shared body for plain and taped evaluation; `up(stage, guide, x)`
/// applies upsampler 1 or 2.
template <typename V, typename Up>
V toy_body(const ToyNetParams<V>& p, const V& x, Up&& up) {
  const V e1 = relu(conv2d(x, p.enc1, 1, kSame));
  const V e2 = relu(conv2d(maxpool2x2(e1), p.enc2, 1, kSame));
  const V m = relu(conv2d(maxpool2x2(e2), p.mid, 1, kSame));
  const V d1 = relu(conv2d(up(1, e2, m), p.dec1, 1, kSame));
  const V d2 = relu(conv2d(up(2, e1, d1), p.dec2, 1, kSame));
  return conv2d(d2, p.head, 1, PadSpec{});
}

template <typename V, typename F>
void for_each_conv(ToyNetParams<V>& p, F&& f) {
  for (ConvParams<V>* c : {&p.enc1, &p.enc2, &p.mid, &p.dec1, &p.dec2, &p.head}) f(*c);
}

template <typename T>
std::vector<int> gather_labels(const std::vector<int>& labels, std::span<const int> order,
                               std::size_t plane) {
  std::vector<int> out;
  out.reserve(order.size() * plane);
  for (int i : order)
    out.insert(out.end(), labels.begin() + static_cast<std::ptrdiff_t>(i * plane),
               labels.begin() + static_cast<std::ptrdiff_t>((i + 1) * plane));
  return out;
}

template <typename T>
void evaluate(const ToyNet<T>& net, const Tensor<T>& inputs, const ToyDataset<T>& test,
              int batch, int radius, EpochRecord& rec, TrainResult& res) {
  const int N = test.inputs.n();
  std::vector<Tensor<T>> outs;
  std::vector<int> pred;
  double sq = 0.0;
  for (int b = 0; b < N; b += batch) {
    const int cnt = std::min(batch, N - b);
    const Tensor<T> y = net.forward(slice_batch(inputs, b, cnt));
    if (test.segmentation()) {
      const auto l = argmax_labels(y);
      pred.insert(pred.end(), l.begin(), l.end());
    } else {
      sq += metric_mse(y, slice_batch(test.targets, b, cnt)) * static_cast<double>(y.numel());
    }
  }
  const Shape& s = test.inputs.shape();
  if (test.segmentation()) {
    res.miou = metric_miou(pred, test.labels, test.classes);
    res.band_iou = metric_band_iou(pred, test.labels, s.n, s.h, s.w, test.classes, radius);
    rec.metric = res.miou;
    rec.metric2 = res.band_iou;
  } else {
    res.mse = sq / static_cast<double>(test.inputs.numel());
    res.psnr = res.mse <= 0.0 ? kPsnrCap : std::min(kPsnrCap, -10.0 * std::log10(res.mse));
    rec.metric = res.mse;
    rec.metric2 = res.psnr;
  }
}

}  // namespace

template <typename T>
Tensor<T> ToyNet<T>::forward(const Tensor<T>& x) const {
  return toy_body(convs, x, [this](int stage, const Tensor<T>& g, const Tensor<T>& v) {
    return (stage == 1 ? up1 : up2).forward(&g, v);
  });
}

template <typename T>
Var<T> ToyNet<T>::forward(Tape<T>& tape, const Var<T>& x, std::vector<Var<T>>& leaves) const {
  leaves.clear();
  ToyNetParams<Var<T>> p;
  auto bind = [&](const ConvWeights<T>& src) {
    ConvParams<Var<T>> out{tape.leaf(src.weight), tape.leaf(*src.bias)};
    leaves.push_back(out.weight);
    leaves.push_back(*out.bias);
    return out;
  };
  p.enc1 = bind(convs.enc1);
  p.enc2 = bind(convs.enc2);
  p.mid = bind(convs.mid);
  p.dec1 = bind(convs.dec1);
  p.dec2 = bind(convs.dec2);
  p.head = bind(convs.head);
  const auto w1 = up1.bind(tape);
  const auto w2 = up2.bind(tape);
  for (const auto* w : {&w1, &w2})
    for (const auto& r : fade::parameters(*w)) leaves.push_back(*r.value);
  return toy_body(p, x, [&](int stage, const Var<T>& g, const Var<T>& v) {
    return stage == 1 ? up1.forward(&g, v, w1) : up2.forward(&g, v, w2);
  });
}

template <typename T>
std::vector<Tensor<T>*> ToyNet<T>::parameters() {
  std::vector<Tensor<T>*> out;
  for_each_conv(convs, [&](ConvWeights<T>& c) {
    out.push_back(&c.weight);
    out.push_back(&*c.bias);
  });
  for (auto* op : {&up1, &up2})
    for (const auto& r : fade::parameters(op->weights())) out.push_back(r.value);
  return out;
}

template <typename T>
std::vector<Tensor<T>> ToyNet<T>::gate_maps(const Tensor<T>& x) const {
  std::vector<Tensor<T>> out;
  if (fusion_of(up1.config()) == Fusion::none) return out;
  toy_body(convs, x, [&](int stage, const Tensor<T>& g, const Tensor<T>& v) {
    const auto& op = stage == 1 ? up1 : up2;
    out.push_back(op.gate_map(v));
    return op.forward(&g, v);
  });
  return out;
}

template <typename T>
ToyNet<T> build_toy_net(int in_channels, int out_channels, int width,
                        const OperatorConfig& upsampler, std::uint64_t seed) {
  if (in_channels < 1 || out_channels < 1 || width < 1)
    throw ConfigError("toy net channel counts must be positive");
  Rng rng(seed);
  ToyNetParams<Tensor<T>> c{he_conv<T>(width, in_channels, 3, rng), he_conv<T>(width, width, 3, rng),
                            he_conv<T>(width, width, 3, rng),       he_conv<T>(width, width, 3, rng),
                            he_conv<T>(width, width, 3, rng),       he_conv<T>(out_channels, width, 1, rng)};
  OperatorConfig oc = upsampler;
  oc.C = width;
  oc.C_en = 0;
  oc.seed = rng.split();
  auto up1 = build_operator<T>(oc);
  oc.seed = rng.split();
  auto up2 = build_operator<T>(oc);
  return ToyNet<T>{std::move(c), std::move(up1), std::move(up2)};
}

int band_radius_for(int size) { return std::max(1, static_cast<int>(std::lround(2.0 * size / 64.0))); }

template <typename T>
TrainResult train_toy(const TrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.batch < 1 || cfg.test_count < 1)
    throw ConfigError("epochs, batch and test_count must be positive");
  const ToyDataset<T> train = make_toy_task<T>(cfg.task);
  ToyTask test_spec = cfg.task;
  test_spec.seed = cfg.task.seed + 1;
  test_spec.count = cfg.test_count;
  const ToyDataset<T> test = make_toy_task<T>(test_spec);

  // Standardize network inputs with training-set statistics.
  double mean = 0.0, var = 0.0;
  for (T v : train.inputs.data()) mean += v;
  mean /= static_cast<double>(train.inputs.numel());
  for (T v : train.inputs.data()) var += (v - mean) * (v - mean);
  const double inv_std = 1.0 / std::sqrt(var / static_cast<double>(train.inputs.numel()) + 1e-12);
  auto standardize = [&](const Tensor<T>& x) {
    Tensor<T> out(x.shape());
    for (std::size_t i = 0; i < x.numel(); ++i)
      out[i] = static_cast<T>((x[i] - mean) * inv_std);
    return out;
  };
  const Tensor<T> train_x = standardize(train.inputs);
  const Tensor<T> test_x = standardize(test.inputs);

  OperatorConfig oc;
  oc.variant = cfg.variant;
  oc.d = cfg.d;
  oc.K = cfg.K;
  oc.impl = cfg.impl;
  const int out_ch = train.segmentation() ? train.classes : 1;
  ToyNet<T> net = build_toy_net<T>(1, out_ch, cfg.width, oc, cfg.seed);
  // Regression starts from the target mean.
  if (!train.segmentation()) (*net.convs.head.bias)[0] = static_cast<T>(mean);
  Rng order_rng(cfg.seed ^ 0x5DEECE66DULL);
  Sgd<T> opt(cfg.lr, cfg.momentum);

  TrainResult res;
  res.segmentation = train.segmentation();
  const int N = train.inputs.n();
  const std::size_t plane = train.inputs.shape().plane();
  const int radius = band_radius_for(cfg.task.size);
  std::vector<int> order(N);
  auto params = net.parameters();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    for (int i = N - 1; i > 0; --i)
      std::swap(order[i], order[order_rng.below(static_cast<std::uint64_t>(i) + 1)]);
    EpochRecord rec;
    rec.epoch = epoch;
    double loss_sum = 0.0;
    int batches = 0;
    try {
      for (int b = 0; b < N; b += cfg.batch) {
        const std::span<const int> idx(order.data() + b, std::min(cfg.batch, N - b));
        Tape<T> tape;
        std::vector<Var<T>> leaves;
        const Var<T> x = tape.constant(gather_batch(train_x, idx));
        const Var<T> y = net.forward(tape, x, leaves);
        const Var<T> loss =
            train.segmentation()
                ? softmax_cross_entropy(y, gather_labels<T>(train.labels, idx, plane))
                : mse_loss(y, gather_batch(train.targets, idx));
        const double lv = static_cast<double>(loss.value()[0]);
        if (!std::isfinite(lv)) throw NumericError("non-finite loss");
        tape.backward(loss);
        std::vector<Tensor<T>> grads;
        grads.reserve(leaves.size());
        double sq = 0.0;
        for (const auto& l : leaves) {
          grads.push_back(tape.grad(l));
          for (T g : grads.back().data()) sq += static_cast<double>(g) * g;
        }
        const double norm = std::sqrt(sq);
        if (!std::isfinite(norm)) throw NumericError("non-finite gradient");
        if (cfg.clip_norm > 0.0 && norm > cfg.clip_norm)
          for (auto& g : grads) g = scale(g, static_cast<T>(cfg.clip_norm / norm));
        opt.step(params, grads);
        loss_sum += lv;
        ++batches;
      }
    } catch (const NumericError& e) {
      rec.diverged = true;
      rec.loss = std::nan("");
      res.diverged = true;
      res.divergence = "epoch " + std::to_string(epoch) + ": " + e.what();
      res.history.push_back(rec);
      break;
    }
    rec.loss = loss_sum / batches;
    evaluate(net, test_x, test, cfg.batch, radius, rec, res);
    res.history.push_back(rec);
  }

  const Tensor<T> x0 = slice_batch(test_x, 0, 1);
  const Tensor<T> y0 = net.forward(x0);
  const Shape img{1, 1, test.inputs.h(), test.inputs.w()};
  res.sample_input = cast<T, double>(slice_batch(test.inputs, 0, 1));
  if (test.segmentation()) {
    res.sample_target = Tensor<double>(img);
    res.sample_prediction = Tensor<double>(img);
    const auto labels = argmax_labels(y0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      res.sample_target[i] = test.labels[i];
      res.sample_prediction[i] = labels[i];
    }
  } else {
    res.sample_target = cast<T, double>(slice_batch(test.targets, 0, 1));
    res.sample_prediction = cast<T, double>(y0);
  }
  for (const auto& g : net.gate_maps(x0)) res.sample_gates.push_back(cast<T, double>(g));
  return res;
}

std::string history_csv(const TrainResult& r) {
  std::ostringstream os;
  os << "epoch,loss," << (r.segmentation ? "miou,band_iou" : "mse,psnr") << ",diverged\n";
  char line[160];
  for (const auto& e : r.history) {
    std::snprintf(line, sizeof line, "%d,%.9g,%.9g,%.9g,%d\n", e.epoch, e.loss, e.metric, e.metric2,
                  e.diverged ? 1 : 0);
    os << line;
  }
  return os.str();
}

template struct ToyNet<float>;
template struct ToyNet<double>;
template ToyNet<float> build_toy_net<float>(int, int, int, const OperatorConfig&, std::uint64_t);
template ToyNet<double> build_toy_net<double>(int, int, int, const OperatorConfig&, std::uint64_t);
template TrainResult train_toy<float>(const TrainConfig&);
template TrainResult train_toy<double>(const TrainConfig&);

}  // namespace fade
