/*
 * Copyright 2026 The DHSA Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef DHSA_CODEC_CODEC_H_
#define DHSA_CODEC_CODEC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dhsa/common/bytes.h"
#include "dhsa/shprg/shprg.h"

// Fixed-point quantization of model updates, masking over Z_p, and packing of
// seed batches into plaintext coefficient arrays.
namespace dhsa::codec {

struct QuantParams {
  int w = 16;
  double m_min = -1.0;
  double m_max = 1.0;
  std::uint64_t num_parties = 1;
  std::uint64_t p = std::uint64_t{1} << 24;

  // Throws InvalidArgument unless m_min < m_max (both finite), 1 <= w <= 32,
  // p is a power of two and N * 2^w <= p. The last condition gives
  // p > N(2^w - 1) plus room for the negative noise window used by Unmask.
  void Validate() const;

  std::uint64_t levels() const { return std::uint64_t{1} << w; }
  double step() const { return (m_max - m_min) / static_cast<double>(levels()); }
};

// Values in [0, 2^w).
struct QuantizedVector {
  std::vector<std::uint64_t> values;
};

// Values in [0, p).
struct MaskedVector {
  std::vector<std::uint64_t> values;

  bool operator==(const MaskedVector&) const = default;
};

struct QuantizeResult {
  QuantizedVector x;
  std::size_t clipped = 0;
};

// Q(m) = floor(2^w (m - m_min) / (m_max - m_min)) after clipping m to
// [m_min, m_max); clamped to 2^w - 1. Throws InvalidArgument naming the first
// non-finite entry.
QuantizeResult Quantize(std::span<const double> m, const QuantParams& qp);

// Q^-1(x) = 2^-w (m_max - m_min) x + N m_min. Throws ProtocolError if an entry
// exceeds N (2^w - 1), which signals an aggregation overflow.
std::vector<double> Dequantize(std::span<const std::int64_t> x0, const QuantParams& qp);

// (x + g) mod p.
MaskedVector Mask(const QuantizedVector& x, const shprg::MaskStream& g, std::uint64_t p);

// acc = (acc + y) mod p.
void AddMasked(MaskedVector& acc, const MaskedVector& y, std::uint64_t p);

// (y0 - g0) mod p, with values in (p - N, p) read as negative noise.
std::vector<std::int64_t> Unmask(const MaskedVector& y0, const shprg::MaskStream& g0,
                                 std::uint64_t p, std::uint64_t num_parties);

// Number of plaintexts holding mu * tau seed entries: ceil(mu * tau / n).
std::size_t PackedArrayCount(std::size_t mu, std::size_t tau, std::size_t n);

// Flattens seeds epoch-major into ceil(mu * tau / n) zero-padded arrays of n
// coefficients. Every entry must fit in 64 bits.
std::vector<std::vector<std::uint64_t>> PackSeeds(std::span<const shprg::Seed> seeds,
                                                  std::size_t n);

// Inverse of PackSeeds; throws InvalidArgument on a shape mismatch.
std::vector<shprg::Seed> UnpackSeeds(std::span<const std::vector<std::uint64_t>> arrays,
                                     std::size_t mu, std::size_t tau);

// M values of log2(p) bits each, bit-packed little-endian; no length prefix.
void SerializeMasked(const MaskedVector& y, int log_p, ByteWriter& out);
MaskedVector DeserializeMasked(ByteReader& in, std::size_t count, int log_p);
std::size_t MaskedSize(std::size_t count, int log_p);

}  // namespace dhsa::codec

#endif  // DHSA_CODEC_CODEC_H_
