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


#ifndef DHSA_SHPRG_SHPRG_H_
#define DHSA_SHPRG_SHPRG_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dhsa/common/bytes.h"
#include "dhsa/common/prng.h"

// Learning-with-rounding PRG G(s) = floor(A^T s * p / q) with A in Z_q^{mu x M}
// derived column by column from a public seed. Seeds add up to within
// +-(N-1) per output entry: G(s1 + ... + sN) = sum G(si) + e.
namespace dhsa::shprg {

using u128 = unsigned __int128;

struct ShprgParams {
  int mu = 0;
  int log_p = 0;
  int log_q = 0;
  Seed32 crs{};
  // 'A'..'D' for the built-in settings, '-' otherwise.
  char setting = '-';

  // Built-in settings: A (512, 2^24, 2^54), B (512, 2^32, 2^64),
  // C (256, 2^24, 2^72), D (1024, 2^32, 2^48).
  static ShprgParams Preset(char setting, const Seed32& crs);

  // Throws InvalidArgument unless 1 <= log_p < log_q <= 127, log_p <= 63,
  // mu >= 1 and q / p > mu.
  void Validate() const;

  std::uint64_t p() const { return std::uint64_t{1} << log_p; }
  u128 q() const { return u128{1} << log_q; }
  bool wide() const { return log_q > 64; }
  // Bytes of keystream per matrix entry.
  std::size_t entry_bytes() const { return wide() ? 16 : 8; }

  // Largest party count for w-bit updates: floor(p / 2^w), which guarantees
  // p > N (2^w - 1).
  std::uint64_t MaxClients(int w) const;

  std::string Describe() const;
};

// Element of Z_q^mu.
struct Seed {
  std::vector<u128> entries;

  bool operator==(const Seed&) const = default;
};

// G(s): values in [0, p).
struct MaskStream {
  std::vector<std::uint64_t> values;

  bool operator==(const MaskStream&) const = default;
};

class MatrixCache;

class Shprg {
 public:
  explicit Shprg(ShprgParams params);

  const ShprgParams& params() const { return params_; }

  // Materializes the first columns of A, as many as fit in `budget_bytes`
  // (capped at `columns`). Copies of this object share the cache.
  void CacheColumns(std::size_t columns, std::size_t budget_bytes = kDefaultCacheBudget);
  std::size_t cached_columns() const;

  // Column-major block of A: entry (i, j) at index (j - col_start) * mu + i.
  std::vector<u128> DeriveMatrixBlock(std::size_t col_start, std::size_t col_count) const;

  MaskStream Expand(const Seed& seed, std::size_t out_len) const;

  // Expands several seeds in one pass over A.
  std::vector<MaskStream> ExpandMany(std::span<const Seed> seeds, std::size_t out_len) const;

  // Entry-wise sum mod q; throws InvalidArgument on a length mismatch.
  Seed AddSeeds(std::span<const Seed> seeds) const;

  Seed SampleSeed(Prng& prng) const;

  // Entries reduced mod q.
  Seed Reduce(Seed seed) const;

  // Throws InvalidArgument unless the seed has mu entries, each below q.
  void CheckSeed(const Seed& seed) const;

  static constexpr std::size_t kDefaultCacheBudget = std::size_t{512} << 20;

 private:
  ShprgParams params_;
  std::array<std::uint8_t, 16> key_{};
  std::shared_ptr<const MatrixCache> cache_;
};

// mu little-endian words of entry_bytes() each.
void SerializeSeed(const ShprgParams& params, const Seed& seed, ByteWriter& out);
Seed DeserializeSeed(const ShprgParams& params, ByteReader& in);

}  // namespace dhsa::shprg

#endif  // DHSA_SHPRG_SHPRG_H_
