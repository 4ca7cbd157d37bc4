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
#include <filesystem>
#include <iosfwd>
#include <variant>

#include "fade/tensor.hpp"

namespace fade {

/// FTEN v1 on-disk layout (all integers little-endian):
///   0..3   "FTEN"
///   4      version = 1
///   5      dtype: 1 = f32, 2 = f64
///   6..7   reserved, zero
///   8..23  u32 n, c, h, w
///   24..   n*c*h*w reals, row-major n->c->h->w
enum class DType : std::uint8_t { f32 = 1, f64 = 2 };

inline constexpr std::size_t kFtenHeaderBytes = 24;

using AnyTensor = std::variant<Tensor<float>, Tensor<double>>;

template <typename T>
void write_ften(std::ostream& os, const Tensor<T>& t);
template <typename T>
void write_ften(const std::filesystem::path& path, const Tensor<T>& t);

/// Throws FormatError on bad magic, version, dtype, reserved bytes or a
/// truncated payload.
AnyTensor read_ften(std::istream& is);
AnyTensor read_ften(const std::filesystem::path& path);

/// Reads a tensor and converts it to T if the stored dtype differs.
template <typename T>
Tensor<T> read_ften_as(const std::filesystem::path& path);

std::size_t ften_size_bytes(const Shape& s, DType dt);

template <typename T>
constexpr DType dtype_of() {
  return sizeof(T) == 4 ? DType::f32 : DType::f64;
}

/// Binary PGM (P5, 8-bit) of plane (n, c), min-max normalized to 0..255.
/// A constant plane maps to all zeros.
template <typename T>
void write_pgm(const std::filesystem::path& path, const Tensor<T>& t,
               int n = 0, int c = 0);

}  // namespace fade
