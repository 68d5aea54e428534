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


#include "dhsa/codec/codec.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "dhsa/common/errors.h"

namespace dhsa::codec {

namespace {

void CheckSameLength(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": length mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

void QuantParams::Validate() const {
  if (!std::isfinite(m_min) || !std::isfinite(m_max) || !(m_min < m_max)) {
    throw InvalidArgument("quantization range requires finite m_min < m_max");
  }
  if (w < 1 || w > 32) throw InvalidArgument("w must be in [1, 32]");
  if (num_parties < 1) throw InvalidArgument("party count must be positive");
  if (!std::has_single_bit(p)) throw InvalidArgument("p must be a power of two");
  if (num_parties > (p >> w)) {
    throw InvalidArgument("p > N(2^w-1) violated: N=" + std::to_string(num_parties) +
                          " w=" + std::to_string(w) + " p=2^" +
                          std::to_string(std::countr_zero(p)) + " allows at most " +
                          std::to_string(p >> w) + " clients");
  }
}

QuantizeResult Quantize(std::span<const double> m, const QuantParams& qp) {
  const double scale = static_cast<double>(qp.levels()) / (qp.m_max - qp.m_min);
  const std::uint64_t top = qp.levels() - 1;
  QuantizeResult r;
  r.x.values.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    double v = m[i];
    if (!std::isfinite(v)) {
      throw InvalidArgument("non-finite model update entry at index " + std::to_string(i));
    }
    if (v < qp.m_min || v >= qp.m_max) {
      ++r.clipped;
      v = std::clamp(v, qp.m_min, qp.m_max);
    }
    const double q = std::floor((v - qp.m_min) * scale);
    r.x.values[i] = std::min(static_cast<std::uint64_t>(std::max(q, 0.0)), top);
  }
  return r;
}

std::vector<double> Dequantize(std::span<const std::int64_t> x0, const QuantParams& qp) {
  const std::int64_t limit = static_cast<std::int64_t>(qp.num_parties * (qp.levels() - 1));
  const double step = qp.step();
  const double offset = static_cast<double>(qp.num_parties) * qp.m_min;
  std::vector<double> out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (x0[i] > limit) {
      throw ProtocolError("aggregate entry " + std::to_string(i) + " = " +
                          std::to_string(x0[i]) + " exceeds N(2^w-1) = " +
                          std::to_string(limit));
    }
    out[i] = step * static_cast<double>(x0[i]) + offset;
  }
  return out;
}

MaskedVector Mask(const QuantizedVector& x, const shprg::MaskStream& g, std::uint64_t p) {
  CheckSameLength(x.values.size(), g.values.size(), "mask");
  MaskedVector y;
  y.values.resize(x.values.size());
  const std::uint64_t mask = p - 1;
  for (std::size_t i = 0; i < y.values.size(); ++i) {
    y.values[i] = (x.values[i] + g.values[i]) & mask;
  }
  return y;
}

void AddMasked(MaskedVector& acc, const MaskedVector& y, std::uint64_t p) {
  CheckSameLength(acc.values.size(), y.values.size(), "masked sum");
  const std::uint64_t mask = p - 1;
  for (std::size_t i = 0; i < y.values.size(); ++i) {
    acc.values[i] = (acc.values[i] + y.values[i]) & mask;
  }
}

std::vector<std::int64_t> Unmask(const MaskedVector& y0, const shprg::MaskStream& g0,
                                 std::uint64_t p, std::uint64_t num_parties) {
  CheckSameLength(y0.values.size(), g0.values.size(), "unmask");
  const std::uint64_t mask = p - 1;
  const std::uint64_t window = p - num_parties;
  std::vector<std::int64_t> x0(y0.values.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const std::uint64_t v = (y0.values[i] - g0.values[i]) & mask;
    x0[i] = v > window ? static_cast<std::int64_t>(v) - static_cast<std::int64_t>(p)
                       : static_cast<std::int64_t>(v);
  }
  return x0;
}

std::size_t PackedArrayCount(std::size_t mu, std::size_t tau, std::size_t n) {
  if (n == 0) throw InvalidArgument("ring degree must be positive");
  return (mu * tau + n - 1) / n;
}

std::vector<std::vector<std::uint64_t>> PackSeeds(std::span<const shprg::Seed> seeds,
                                                  std::size_t n) {
  if (seeds.empty()) throw InvalidArgument("no seeds to pack");
  const std::size_t mu = seeds.front().entries.size();
  std::vector<std::vector<std::uint64_t>> arrays(
      PackedArrayCount(mu, seeds.size(), n), std::vector<std::uint64_t>(n, 0));
  std::size_t k = 0;
  for (const shprg::Seed& s : seeds) {
    CheckSameLength(s.entries.size(), mu, "pack seeds");
    for (shprg::u128 e : s.entries) {
      if (e >> 64 != 0) throw InvalidArgument("seed entry does not fit a 64-bit coefficient");
      arrays[k / n][k % n] = static_cast<std::uint64_t>(e);
      ++k;
    }
  }
  return arrays;
}

std::vector<shprg::Seed> UnpackSeeds(std::span<const std::vector<std::uint64_t>> arrays,
                                     std::size_t mu, std::size_t tau) {
  if (arrays.empty()) throw InvalidArgument("no arrays to unpack");
  const std::size_t n = arrays.front().size();
  if (arrays.size() != PackedArrayCount(mu, tau, n)) {
    throw InvalidArgument("unpack seeds: expected " +
                          std::to_string(PackedArrayCount(mu, tau, n)) + " arrays, got " +
                          std::to_string(arrays.size()));
  }
  for (const auto& a : arrays) CheckSameLength(a.size(), n, "unpack seeds");
  std::vector<shprg::Seed> seeds(tau);
  std::size_t k = 0;
  for (auto& s : seeds) {
    s.entries.resize(mu);
    for (auto& e : s.entries) {
      e = arrays[k / n][k % n];
      ++k;
    }
  }
  return seeds;
}

void SerializeMasked(const MaskedVector& y, int log_p, ByteWriter& out) {
  out.PutPacked(y.values, log_p);
}

MaskedVector DeserializeMasked(ByteReader& in, std::size_t count, int log_p) {
  return MaskedVector{in.GetPacked(count, log_p)};
}

std::size_t MaskedSize(std::size_t count, int log_p) { return PackedSize(count, log_p); }

}  // namespace dhsa::codec
