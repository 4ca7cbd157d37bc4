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
#include <string>
#include <vector>

#include "fade/operators.hpp"
#include "fade/toy.hpp"

namespace fade {

template <typename V>
struct ToyNetParams {
  ConvParams<V> enc1, enc2, mid, dec1, dec2, head;
};

/// Two-level encoder-decoder:
///   e1 = relu(conv3(x))            full res   guide for up2
///   e2 = relu(conv3(pool(e1)))     1/2        guide for up1
///   m  = relu(conv3(pool(e2)))     1/4
///   d1 = relu(conv3(up1(e2, m)))   1/2
///   d2 = relu(conv3(up2(e1, d1)))  full res
///   y  = conv1(d2)
/// Every hidden layer has `width` channels, so the upsamplers never need a
/// channel adapter.
template <typename T>
struct ToyNet {
  ToyNetParams<Tensor<T>> convs;
  UpsampleOperator<T> up1;
  UpsampleOperator<T> up2;

  Tensor<T> forward(const Tensor<T>& x) const;
  Var<T> forward(Tape<T>& tape, const Var<T>& x, std::vector<Var<T>>& leaves) const;
  /// Trainable tensors in a fixed order matching the leaves of forward().
  std::vector<Tensor<T>*> parameters();
  /// Gate maps of up1 and up2 for input x; empty for variants without fusion.
  std::vector<Tensor<T>> gate_maps(const Tensor<T>& x) const;
};

/// Convolutions draw from Rng(seed) first; each upsampler is then built
/// with a seed split off the same stream.
template <typename T>
ToyNet<T> build_toy_net(int in_channels, int out_channels, int width,
                        const OperatorConfig& upsampler, std::uint64_t seed);

struct TrainConfig {
  ToyTask task;
  Variant variant = Variant::fade;
  int epochs = 20;
  double lr = 0.05;
  double momentum = 0.9;
  /// Rescale the joint gradient to at most this L2 norm (0 disables).
  double clip_norm = 1.0;
  int batch = 4;
  int width = 8;
  int d = 8;
  int K = 5;
  int test_count = 32;
  SemiShiftImpl impl = SemiShiftImpl::l2h;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  /// Held-out metrics after the epoch: mIoU and band IoU for segmentation,
  /// MSE and PSNR for reconstruction.
  double metric = 0.0;
  double metric2 = 0.0;
  bool diverged = false;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  bool diverged = false;
  std::string divergence;
  bool segmentation = true;
  double miou = 0.0;
  double band_iou = 0.0;
  double mse = 0.0;
  double psnr = 0.0;

  /// First held-out image after training, for figure dumps. The
  /// prediction is the label map (segmentation) or the reconstruction.
  Tensor<double> sample_input;
  Tensor<double> sample_target;
  Tensor<double> sample_prediction;
  std::vector<Tensor<double>> sample_gates;

  /// Headline metric: mIoU for segmentation, MSE for reconstruction.
  double headline() const { return segmentation ? miou : mse; }
};

/// Deterministic given the config. Training and test sets come from
/// task.seed and task.seed + 1; network weights and batch order from
/// config.seed. A non-finite loss or gradient stops the run and is
/// reported in the result rather than thrown.
template <typename T = float>
TrainResult train_toy(const TrainConfig& cfg);

/// Header plus one row per epoch: epoch,loss,<metric names>,diverged.
std::string history_csv(const TrainResult& r);

/// Band radius used for band IoU, 2 pixels at 64 px scaled with size.
int band_radius_for(int size);

}  // namespace fade
