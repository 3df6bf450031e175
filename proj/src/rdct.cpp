// Copyright 2026 The rdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bit>
#include <cstring>
#include <limits>

#include "rdl/error.hpp"
#include "rdl/ksvd.hpp"

namespace rdl {

namespace {

constexpr char kMagic[4] = {'R', 'D', 'C', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
  return v;
}

double get_f64(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[off + i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_rdct(const Dictionary& D) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (D.n() > kMax || D.K() > kMax) throw ContractViolation("encode_rdct: dictionary too large");
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.reserve(kHeaderSize + static_cast<std::size_t>(D.atoms().size()) * 8);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(D.n()));
  put_u32(out, static_cast<std::uint32_t>(D.K()));
  const Eigen::MatrixXd& A = D.atoms();
  for (Eigen::Index k = 0; k < A.cols(); ++k) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) put_f64(out, A(i, k));
  }
  return out;
}

Dictionary decode_rdct(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw TruncationError("RDCT: stream shorter than magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ParseError("RDCT: bad magic", 0);
  if (bytes.size() < kHeaderSize) throw TruncationError("RDCT: header truncated");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kVersion) {
    throw ParseError("RDCT: unsupported version " + std::to_string(version), 4);
  }
  const std::uint32_t n = get_u32(bytes, 8);
  const std::uint32_t K = get_u32(bytes, 12);
  if (n == 0) throw ParseError("RDCT: zero signal dimension", 8);
  if (K == 0) throw ParseError("RDCT: zero atom count", 12);
  const std::size_t payload = static_cast<std::size_t>(n) * K * 8;
  if (bytes.size() - kHeaderSize < payload) {
    throw TruncationError("RDCT: payload has " + std::to_string(bytes.size() - kHeaderSize) +
                          " bytes, expected " + std::to_string(payload));
  }
  if (bytes.size() - kHeaderSize > payload) {
    throw ParseError("RDCT: trailing bytes after payload", kHeaderSize + payload);
  }
  Eigen::MatrixXd A(n, K);
  std::size_t off = kHeaderSize;
  for (Eigen::Index k = 0; k < A.cols(); ++k) {
    for (Eigen::Index i = 0; i < A.rows(); ++i, off += 8) A(i, k) = get_f64(bytes, off);
  }
  return Dictionary(std::move(A));
}

}  // namespace rdl
