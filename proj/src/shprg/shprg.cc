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


#include "dhsa/shprg/shprg.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <sstream>

#include "dhsa/common/errors.h"

namespace dhsa::shprg {

static_assert(std::endian::native == std::endian::little,
              "matrix derivation reads keystream words in little-endian order");

class MatrixCache {
 public:
  std::size_t columns = 0;
  std::vector<std::uint64_t> narrow;
  std::vector<u128> wide;
};

namespace {

// Columns processed per keystream request.
constexpr std::size_t kChunkBytes = 256 * 1024;

u128 Mask(int bits) { return bits >= 128 ? ~u128{0} : (u128{1} << bits) - 1; }

// Raw keystream for columns [col_start, col_start + count) of A.
void FillColumns(const std::array<std::uint8_t, 16>& key, const ShprgParams& params,
                 std::size_t col_start, std::span<std::uint8_t> out) {
  const u128 start = static_cast<u128>(col_start) * params.mu * params.entry_bytes();
  CounterStream stream(key, start / 16);
  if (const std::size_t skip = static_cast<std::size_t>(start % 16); skip != 0) {
    std::array<std::uint8_t, 16> discard;
    stream.Fill(std::span(discard).first(skip));
  }
  stream.Fill(out);
}

template <typename Word>
void FillWords(const std::array<std::uint8_t, 16>& key, const ShprgParams& params,
               std::size_t col_start, std::span<Word> out) {
  FillColumns(key, params, col_start,
              std::span(reinterpret_cast<std::uint8_t*>(out.data()), out.size_bytes()));
}

// Shared expansion loop; Word is uint64_t when q <= 2^64 (arithmetic mod 2^64
// then masked) and u128 otherwise.
template <typename Word>
std::vector<MaskStream> ExpandImpl(const ShprgParams& params,
                                   const std::array<std::uint8_t, 16>& key,
                                   std::span<const Word> cached, std::size_t cached_columns,
                                   std::span<const Seed> seeds, std::size_t out_len) {
  const std::size_t mu = static_cast<std::size_t>(params.mu);
  const Word q_mask = static_cast<Word>(Mask(params.log_q));
  const int shift = params.log_q - params.log_p;

  std::vector<std::vector<Word>> s(seeds.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    s[k].assign(seeds[k].entries.begin(), seeds[k].entries.end());
  }
  std::vector<MaskStream> out(seeds.size());
  for (auto& m : out) m.values.resize(out_len);

  const std::size_t chunk_columns = std::max<std::size_t>(1, kChunkBytes / (mu * sizeof(Word)));
  std::vector<Word> buffer;
  for (std::size_t col0 = 0; col0 < out_len;) {
    std::size_t count = std::min(chunk_columns, out_len - col0);
    const Word* a;
    if (col0 < cached_columns) {
      count = std::min(count, cached_columns - col0);
      a = cached.data() + col0 * mu;
    } else {
      buffer.resize(count * mu);
      FillWords<Word>(key, params, col0, buffer);
      a = buffer.data();
    }
    for (std::size_t c = 0; c < count; ++c, a += mu) {
      std::size_t k = 0;
      // Seeds in pairs so each matrix column is loaded once per pair.
      for (; k + 1 < s.size(); k += 2) {
        const Word* s0 = s[k].data();
        const Word* s1 = s[k + 1].data();
        Word x0 = 0, x1 = 0, y0 = 0, y1 = 0;
        std::size_t i = 0;
        for (; i + 1 < mu; i += 2) {
          x0 += a[i] * s0[i];
          x1 += a[i + 1] * s0[i + 1];
          y0 += a[i] * s1[i];
          y1 += a[i + 1] * s1[i + 1];
        }
        if (i < mu) {
          x0 += a[i] * s0[i];
          y0 += a[i] * s1[i];
        }
        out[k].values[col0 + c] = static_cast<std::uint64_t>(((x0 + x1) & q_mask) >> shift);
        out[k + 1].values[col0 + c] = static_cast<std::uint64_t>(((y0 + y1) & q_mask) >> shift);
      }
      if (k < s.size()) {
        const Word* sk = s[k].data();
        Word acc = 0;
        for (std::size_t i = 0; i < mu; ++i) acc += a[i] * sk[i];
        out[k].values[col0 + c] = static_cast<std::uint64_t>((acc & q_mask) >> shift);
      }
    }
    col0 += count;
  }
  return out;
}

}  // namespace

ShprgParams ShprgParams::Preset(char setting, const Seed32& crs) {
  ShprgParams p;
  p.crs = crs;
  p.setting = setting;
  switch (setting) {
    case 'A': p.mu = 512; p.log_p = 24; p.log_q = 54; break;
    case 'B': p.mu = 512; p.log_p = 32; p.log_q = 64; break;
    case 'C': p.mu = 256; p.log_p = 24; p.log_q = 72; break;
    case 'D': p.mu = 1024; p.log_p = 32; p.log_q = 48; break;
    default:
      throw InvalidArgument(std::string("unknown setting '") + setting + "' (expected A, B, C or D)");
  }
  return p;
}

void ShprgParams::Validate() const {
  if (mu < 1) throw InvalidArgument("mu must be positive");
  if (log_p < 1 || log_p > 63) throw InvalidArgument("log2 p must be in [1, 63]");
  if (log_q > 127) throw InvalidArgument("log2 q must be at most 127");
  if (log_p >= log_q) throw InvalidArgument("p must be smaller than q");
  if (log_q - log_p < 64 && (u128{1} << (log_q - log_p)) <= static_cast<u128>(mu)) {
    throw InvalidArgument("q / p must exceed mu");
  }
}

std::uint64_t ShprgParams::MaxClients(int w) const {
  if (w < 1 || w >= log_p) return 0;
  return p() >> w;
}

std::string ShprgParams::Describe() const {
  std::ostringstream os;
  if (setting != '-') os << "setting " << setting << ": ";
  os << "mu=" << mu << " p=2^" << log_p << " q=2^" << log_q;
  return os.str();
}

Shprg::Shprg(ShprgParams params) : params_(params) {
  params_.Validate();
  const Seed32 k = DeriveSeed(params_.crs, "dhsa/shprg/matrix");
  std::copy_n(k.begin(), key_.size(), key_.begin());
}

void Shprg::CacheColumns(std::size_t columns, std::size_t budget_bytes) {
  const std::size_t column_bytes = params_.entry_bytes() * params_.mu;
  columns = std::min(columns, budget_bytes / column_bytes);
  if (cache_ && cache_->columns >= columns) return;
  auto cache = std::make_shared<MatrixCache>();
  cache->columns = columns;
  if (params_.wide()) {
    cache->wide.resize(columns * params_.mu);
    FillWords<u128>(key_, params_, 0, cache->wide);
  } else {
    cache->narrow.resize(columns * params_.mu);
    FillWords<std::uint64_t>(key_, params_, 0, cache->narrow);
  }
  cache_ = std::move(cache);
}

std::size_t Shprg::cached_columns() const { return cache_ ? cache_->columns : 0; }

std::vector<u128> Shprg::DeriveMatrixBlock(std::size_t col_start,
                                           std::size_t col_count) const {
  const std::size_t entries = col_count * params_.mu;
  const u128 q_mask = Mask(params_.log_q);
  std::vector<u128> out(entries);
  if (params_.wide()) {
    FillWords<u128>(key_, params_, col_start, out);
    for (auto& v : out) v &= q_mask;
  } else {
    std::vector<std::uint64_t> words(entries);
    FillWords<std::uint64_t>(key_, params_, col_start, words);
    for (std::size_t i = 0; i < entries; ++i) out[i] = words[i] & q_mask;
  }
  return out;
}

MaskStream Shprg::Expand(const Seed& seed, std::size_t out_len) const {
  return std::move(ExpandMany(std::span(&seed, 1), out_len).front());
}

std::vector<MaskStream> Shprg::ExpandMany(std::span<const Seed> seeds,
                                          std::size_t out_len) const {
  for (const Seed& s : seeds) CheckSeed(s);
  const std::size_t cached = cached_columns();
  if (params_.wide()) {
    return ExpandImpl<u128>(params_, key_, cache_ ? std::span<const u128>(cache_->wide) : std::span<const u128>(),
                            cached, seeds, out_len);
  }
  return ExpandImpl<std::uint64_t>(
      params_, key_, cache_ ? std::span<const std::uint64_t>(cache_->narrow) : std::span<const std::uint64_t>(),
      cached, seeds, out_len);
}

Seed Shprg::AddSeeds(std::span<const Seed> seeds) const {
  const u128 q_mask = Mask(params_.log_q);
  Seed sum{std::vector<u128>(params_.mu, 0)};
  for (const Seed& s : seeds) {
    if (s.entries.size() != sum.entries.size()) {
      throw InvalidArgument("seed length " + std::to_string(s.entries.size()) +
                            " does not match mu=" + std::to_string(params_.mu));
    }
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      sum.entries[i] = (sum.entries[i] + s.entries[i]) & q_mask;
    }
  }
  return sum;
}

Seed Shprg::SampleSeed(Prng& prng) const {
  const u128 q_mask = Mask(params_.log_q);
  Seed s;
  s.entries.resize(params_.mu);
  for (auto& e : s.entries) {
    u128 v = prng.Next64();
    if (params_.wide()) v |= static_cast<u128>(prng.Next64()) << 64;
    e = v & q_mask;
  }
  return s;
}

Seed Shprg::Reduce(Seed seed) const {
  const u128 q_mask = Mask(params_.log_q);
  for (auto& e : seed.entries) e &= q_mask;
  return seed;
}

void Shprg::CheckSeed(const Seed& seed) const {
  if (seed.entries.size() != static_cast<std::size_t>(params_.mu)) {
    throw InvalidArgument("seed length " + std::to_string(seed.entries.size()) +
                          " does not match mu=" + std::to_string(params_.mu));
  }
  const u128 q = params_.q();
  for (u128 e : seed.entries) {
    if (e >= q) throw InvalidArgument("seed entry not below q=2^" + std::to_string(params_.log_q));
  }
}

void SerializeSeed(const ShprgParams& params, const Seed& seed, ByteWriter& out) {
  for (u128 e : seed.entries) {
    out.PutU64(static_cast<std::uint64_t>(e));
    if (params.wide()) out.PutU64(static_cast<std::uint64_t>(e >> 64));
  }
}

Seed DeserializeSeed(const ShprgParams& params, ByteReader& in) {
  Seed s;
  s.entries.resize(params.mu);
  for (auto& e : s.entries) {
    e = in.GetU64();
    if (params.wide()) e |= static_cast<u128>(in.GetU64()) << 64;
    if (e >= params.q()) throw ProtocolError("seed entry out of range");
  }
  return s;
}

}  // namespace dhsa::shprg
