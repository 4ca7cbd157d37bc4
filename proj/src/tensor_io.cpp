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

#include "fade/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace fade {

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'T', 'E', 'N'};
constexpr std::uint8_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

template <typename U>
void put_le(std::ostream& os, U bits) {
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i)
    b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), sizeof(U));
}

template <typename U>
U get_le(const unsigned char* b) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

template <typename T>
Tensor<T> read_payload(std::istream& is, Shape s) {
  using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::vector<unsigned char> raw(s.numel() * sizeof(T));
  is.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size())
    throw FormatError("FTEN: truncated payload (expected " +
                      std::to_string(raw.size()) + " bytes, got " +
                      std::to_string(is.gcount()) + ")");
  std::vector<T> data(s.numel());
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = std::bit_cast<T>(get_le<Bits>(raw.data() + i * sizeof(T)));
  return Tensor<T>(s, std::move(data));
}

}  // namespace

std::size_t ften_size_bytes(const Shape& s, DType dt) {
  return kFtenHeaderBytes + s.numel() * (dt == DType::f32 ? 4 : 8);
}

template <typename T>
void write_ften(std::ostream& os, const Tensor<T>& t) {
  using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  os.write(kMagic.data(), 4);
  const char hdr[4] = {static_cast<char>(kVersion),
                       static_cast<char>(dtype_of<T>()), 0, 0};
  os.write(hdr, 4);
  const Shape& s = t.shape();
  put_u32(os, static_cast<std::uint32_t>(s.n));
  put_u32(os, static_cast<std::uint32_t>(s.c));
  put_u32(os, static_cast<std::uint32_t>(s.h));
  put_u32(os, static_cast<std::uint32_t>(s.w));
  for (T v : t.data()) put_le(os, std::bit_cast<Bits>(v));
  if (!os) throw FormatError("FTEN: write failed");
}

template <typename T>
void write_ften(const std::filesystem::path& path, const Tensor<T>& t) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_ften(os, t);
}

AnyTensor read_ften(std::istream& is) {
  unsigned char hdr[kFtenHeaderBytes];
  is.read(reinterpret_cast<char*>(hdr), kFtenHeaderBytes);
  if (static_cast<std::size_t>(is.gcount()) != kFtenHeaderBytes)
    throw FormatError("FTEN: truncated header");
  if (std::memcmp(hdr, kMagic.data(), 4) != 0)
    throw FormatError("FTEN: bad magic");
  if (hdr[4] != kVersion)
    throw FormatError("FTEN: unsupported version " + std::to_string(hdr[4]));
  if (hdr[6] != 0 || hdr[7] != 0)
    throw FormatError("FTEN: reserved bytes must be zero");
  const std::uint32_t dims[4] = {get_u32(hdr + 8), get_u32(hdr + 12),
                                 get_u32(hdr + 16), get_u32(hdr + 20)};
  for (auto d : dims)
    if (d == 0 || d > static_cast<std::uint32_t>(INT32_MAX))
      throw FormatError("FTEN: invalid dimension " + std::to_string(d));
  const Shape s{static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                static_cast<int>(dims[2]), static_cast<int>(dims[3])};
  switch (hdr[5]) {
    case static_cast<unsigned char>(DType::f32):
      return read_payload<float>(is, s);
    case static_cast<unsigned char>(DType::f64):
      return read_payload<double>(is, s);
    default:
      throw FormatError("FTEN: unknown dtype " + std::to_string(hdr[5]));
  }
}

AnyTensor read_ften(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_ften(is);
}

template <typename T>
Tensor<T> read_ften_as(const std::filesystem::path& path) {
  return std::visit(
      [](auto&& t) -> Tensor<T> {
        using U = typename std::decay_t<decltype(t)>::value_type;
        if constexpr (std::is_same_v<U, T>) {
          return std::move(t);
        } else {
          return cast<U, T>(t);
        }
      },
      read_ften(path));
}

template <typename T>
void write_pgm(const std::filesystem::path& path, const Tensor<T>& t, int n,
               int c) {
  if (n < 0 || n >= t.n() || c < 0 || c >= t.c())
    throw ShapeError("write_pgm: plane index out of range");
  const T* p = t.plane(n, c);
  const std::size_t hw = t.shape().plane();
  const auto [lo, hi] = std::minmax_element(p, p + hw);
  const double span = static_cast<double>(*hi) - static_cast<double>(*lo);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os << "P5\n" << t.w() << " " << t.h() << "\n255\n";
  std::vector<unsigned char> px(hw, 0);
  if (span > 0) {
    for (std::size_t i = 0; i < hw; ++i)
      px[i] = static_cast<unsigned char>(
          std::lround((static_cast<double>(p[i]) - *lo) / span * 255.0));
  }
  os.write(reinterpret_cast<const char*>(px.data()),
           static_cast<std::streamsize>(px.size()));
  if (!os) throw FormatError("PGM: write failed");
}

template void write_ften(std::ostream&, const Tensor<float>&);
template void write_ften(std::ostream&, const Tensor<double>&);
template void write_ften(const std::filesystem::path&, const Tensor<float>&);
template void write_ften(const std::filesystem::path&, const Tensor<double>&);
template Tensor<float> read_ften_as(const std::filesystem::path&);
template Tensor<double> read_ften_as(const std::filesystem::path&);
template void write_pgm(const std::filesystem::path&, const Tensor<float>&, int, int);
template void write_pgm(const std::filesystem::path&, const Tensor<double>&, int, int);

}  // namespace fade
