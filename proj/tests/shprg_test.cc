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

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "dhsa/common/errors.h"
#include "dhsa/common/stats.h"
#include "dhsa/shprg/shprg.h"
#include "gtest/gtest.h"

namespace dhsa::shprg {
namespace {

const Seed32 kCrs = DeriveSeed(SeedFromInt(11), "shprg-test-crs");

ShprgParams Custom(int mu, int log_p, int log_q) {
  ShprgParams p;
  p.mu = mu;
  p.log_p = log_p;
  p.log_q = log_q;
  p.crs = kCrs;
  return p;
}

// Independent keystream: AES-128-ECB over big-endian counter blocks 0, 1, ...
std::vector<std::uint8_t> EcbKeystream(const Seed32& crs, std::size_t bytes) {
  const Seed32 key = DeriveSeed(crs, "dhsa/shprg/matrix");
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  EVP_EncryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, key.data(), nullptr);
  EVP_CIPHER_CTX_set_padding(ctx, 0);
  std::vector<std::uint8_t> out((bytes + 15) / 16 * 16);
  for (std::size_t b = 0; b < out.size() / 16; ++b) {
    std::array<std::uint8_t, 16> ctr{};
    for (int i = 0; i < 8; ++i) ctr[15 - i] = static_cast<std::uint8_t>(b >> (8 * i));
    int len = 0;
    EVP_EncryptUpdate(ctx, out.data() + 16 * b, &len, ctr.data(), 16);
  }
  EVP_CIPHER_CTX_free(ctx);
  out.resize(bytes);
  return out;
}

u128 LoadLe(const std::uint8_t* p, int bytes) {
  u128 v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

// Centered representative of x mod p.
std::int64_t Centered(std::uint64_t x, std::uint64_t p) {
  return x >= p / 2 ? static_cast<std::int64_t>(x) - static_cast<std::int64_t>(p)
                    : static_cast<std::int64_t>(x);
}

TEST(ShprgParamsTest, PresetsAndMaxClients) {
  ShprgParams a = ShprgParams::Preset('A', kCrs);
  EXPECT_EQ(a.mu, 512);
  EXPECT_EQ(a.log_p, 24);
  EXPECT_EQ(a.log_q, 54);
  EXPECT_EQ(a.MaxClients(16), 256u);
  EXPECT_EQ(ShprgParams::Preset('B', kCrs).MaxClients(16), 65536u);
  EXPECT_EQ(ShprgParams::Preset('C', kCrs).MaxClients(16), 256u);
  EXPECT_EQ(ShprgParams::Preset('D', kCrs).MaxClients(16), 65536u);
  EXPECT_TRUE(ShprgParams::Preset('C', kCrs).wide());
  EXPECT_THROW(ShprgParams::Preset('E', kCrs), InvalidArgument);
  for (char s : {'A', 'B', 'C', 'D'}) EXPECT_NO_THROW(ShprgParams::Preset(s, kCrs).Validate());
}

TEST(ShprgParamsTest, ValidationRejectsBadShapes) {
  EXPECT_THROW(Custom(4, 8, 8).Validate(), InvalidArgument);
  EXPECT_THROW(Custom(16, 4, 8).Validate(), InvalidArgument);  // q / p = mu
  EXPECT_THROW(Custom(0, 4, 8).Validate(), InvalidArgument);
  EXPECT_THROW(Custom(2, 4, 128).Validate(), InvalidArgument);
  EXPECT_NO_THROW(Custom(2, 4, 8).Validate());
}

TEST(ShprgTest, MatrixMatchesIndependentKeystream) {
  for (auto params : {Custom(3, 4, 8), ShprgParams::Preset('A', kCrs),
                      ShprgParams::Preset('C', kCrs)}) {
    Shprg g(params);
    const std::size_t cols = 5, eb = params.entry_bytes();
    auto ks = EcbKeystream(kCrs, cols * params.mu * eb);
    auto block = g.DeriveMatrixBlock(0, cols);
    ASSERT_EQ(block.size(), cols * params.mu);
    const u128 mask = (u128{1} << params.log_q) - 1;
    for (std::size_t k = 0; k < block.size(); ++k) {
      ASSERT_EQ(block[k], LoadLe(ks.data() + k * eb, static_cast<int>(eb)) & mask);
    }
  }
}

TEST(ShprgTest, DisjointBlocksConcatenate) {
  // mu = 3 makes column boundaries fall inside AES blocks.
  for (auto params : {Custom(3, 4, 8), ShprgParams::Preset('B', kCrs),
                      ShprgParams::Preset('C', kCrs)}) {
    Shprg g(params);
    auto whole = g.DeriveMatrixBlock(0, 10);
    EXPECT_EQ(whole, g.DeriveMatrixBlock(0, 10));
    auto left = g.DeriveMatrixBlock(0, 3);
    auto mid = g.DeriveMatrixBlock(3, 4);
    auto right = g.DeriveMatrixBlock(7, 3);
    left.insert(left.end(), mid.begin(), mid.end());
    left.insert(left.end(), right.begin(), right.end());
    EXPECT_EQ(left, whole);
  }
}

TEST(ShprgTest, MatrixBytesPassChiSquare) {
  // q = 2^64 so every keystream byte is an entry byte.
  Shprg g(ShprgParams::Preset('B', kCrs));
  auto block = g.DeriveMatrixBlock(0, 1953);  // 999,936 entries
  std::vector<std::uint64_t> counts(256, 0);
  for (u128 v : block) ++counts[static_cast<std::uint8_t>(v)];
  EXPECT_TRUE(ChiSquareUniform(counts).Passes(1e-3));
}

TEST(ShprgTest, ZeroSeedGivesZeroMask) {
  Shprg g(ShprgParams::Preset('A', kCrs));
  Seed zero{std::vector<u128>(512, 0)};
  MaskStream m = g.Expand(zero, 100);
  EXPECT_EQ(m.values, std::vector<std::uint64_t>(100, 0));
}

TEST(ShprgTest, TinyParametersMatchDotProductOracle) {
  ShprgParams params = Custom(2, 4, 8);
  Shprg g(params);
  auto a = g.DeriveMatrixBlock(0, 3);
  Seed s{{200, 77}};
  MaskStream m = g.Expand(s, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    unsigned dot = 0;
    for (std::size_t i = 0; i < 2; ++i) dot += static_cast<unsigned>(a[j * 2 + i] * s.entries[i]);
    EXPECT_EQ(m.values[j], (dot % 256) / 16) << "column " << j;
  }
}

TEST(ShprgTest, WideSettingMatchesOracle) {
  ShprgParams params = ShprgParams::Preset('C', kCrs);
  Shprg g(params);
  Prng prng(SeedFromInt(5));
  Seed s = g.SampleSeed(prng);
  const std::size_t cols = 40;
  auto a = g.DeriveMatrixBlock(0, cols);
  MaskStream m = g.Expand(s, cols);
  const u128 mask = (u128{1} << 72) - 1;
  for (std::size_t j = 0; j < cols; ++j) {
    u128 dot = 0;
    for (std::size_t i = 0; i < 256; ++i) dot = (dot + a[j * 256 + i] * s.entries[i]) & mask;
    ASSERT_EQ(m.values[j], static_cast<std::uint64_t>(dot >> 48));
  }
}

TEST(ShprgTest, CacheDoesNotChangeOutput) {
  for (char setting : {'A', 'C'}) {
    ShprgParams params = ShprgParams::Preset(setting, kCrs);
    Shprg plain(params), cached(params);
    cached.CacheColumns(700);
    EXPECT_EQ(cached.cached_columns(), 700u);
    Prng prng(SeedFromInt(6));
    Seed s = plain.SampleSeed(prng);
    EXPECT_EQ(plain.Expand(s, 1500), cached.Expand(s, 1500));
    Shprg copy = cached;
    EXPECT_EQ(copy.cached_columns(), 700u);
  }
}

TEST(ShprgTest, CacheRespectsBudget) {
  Shprg g(ShprgParams::Preset('A', kCrs));
  g.CacheColumns(1000, 512 * 8 * 10);
  EXPECT_EQ(g.cached_columns(), 10u);
}

TEST(ShprgTest, ExpandManyMatchesSingleExpansions) {
  Shprg g(ShprgParams::Preset('D', kCrs));
  Prng prng(SeedFromInt(7));
  std::vector<Seed> seeds = {g.SampleSeed(prng), g.SampleSeed(prng), g.SampleSeed(prng)};
  auto many = g.ExpandMany(seeds, 333);
  ASSERT_EQ(many.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(many[k], g.Expand(seeds[k], 333));
}

TEST(ShprgTest, MaskEntriesBelowP) {
  for (char setting : {'A', 'B', 'C', 'D'}) {
    Shprg g(ShprgParams::Preset(setting, kCrs));
    Prng prng(SeedFromInt(8));
    for (std::uint64_t v : g.Expand(g.SampleSeed(prng), 2000).values) {
      ASSERT_LT(v, g.params().p());
    }
  }
}

TEST(ShprgTest, AlmostHomomorphicForManySeeds) {
  for (char setting : {'A', 'B', 'C', 'D'}) {
    Shprg g(ShprgParams::Preset(setting, kCrs));
    g.CacheColumns(1000);
    Prng prng(SeedFromInt(9));
    for (std::size_t n : {2u, 5u, 16u, 256u}) {
      std::vector<Seed> seeds;
      for (std::size_t i = 0; i < n; ++i) seeds.push_back(g.SampleSeed(prng));
      const std::uint64_t p = g.params().p();
      std::vector<std::uint64_t> sum(1000, 0);
      for (const auto& m : g.ExpandMany(seeds, 1000)) {
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] = (sum[j] + m.values[j]) % p;
      }
      MaskStream joint = g.Expand(g.AddSeeds(seeds), 1000);
      const std::int64_t bound = static_cast<std::int64_t>(n) - 1;
      for (std::size_t j = 0; j < sum.size(); ++j) {
        std::int64_t e = Centered((sum[j] + p - joint.values[j]) % p, p);
        ASSERT_LE(std::abs(e), bound) << "setting " << setting << " n=" << n << " j=" << j;
      }
    }
  }
}

TEST(ShprgTest, FiveSeedErrorWithinFour) {
  Shprg g(ShprgParams::Preset('A', kCrs));
  Prng prng(SeedFromInt(10));
  std::vector<Seed> seeds;
  for (int i = 0; i < 5; ++i) seeds.push_back(g.SampleSeed(prng));
  const std::uint64_t p = g.params().p();
  auto masks = g.ExpandMany(seeds, 4000);
  MaskStream joint = g.Expand(g.AddSeeds(seeds), 4000);
  for (std::size_t j = 0; j < joint.values.size(); ++j) {
    std::uint64_t s = 0;
    for (const auto& m : masks) s += m.values[j];
    std::int64_t e = Centered((s + p - joint.values[j]) % p, p);
    ASSERT_GE(e, -4);
    ASSERT_LE(e, 4);
  }
}

TEST(ShprgTest, AddSeedsMatchesIntegerSum) {
  Shprg g(ShprgParams::Preset('A', kCrs));
  Prng prng(SeedFromInt(12));
  std::vector<Seed> seeds;
  for (int i = 0; i < 7; ++i) seeds.push_back(g.SampleSeed(prng));
  Seed sum = g.AddSeeds(seeds);
  for (std::size_t i = 0; i < 512; ++i) {
    u128 total = 0;
    for (const auto& s : seeds) total += s.entries[i];
    ASSERT_EQ(sum.entries[i], total % (u128{1} << 54));
  }
  Seed zero{std::vector<u128>(512, 0)};
  std::vector<Seed> with_zero = {seeds[0], zero};
  EXPECT_EQ(g.AddSeeds(with_zero), seeds[0]);
  std::vector<Seed> bad = {seeds[0], Seed{{1, 2}}};
  EXPECT_THROW(g.AddSeeds(bad), InvalidArgument);
}

TEST(ShprgTest, SampleSeedIsReproducibleAndInRange) {
  Shprg a(ShprgParams::Preset('A', kCrs));
  Prng p1(SeedFromInt(13)), p2(SeedFromInt(13));
  Seed s1 = a.SampleSeed(p1);
  EXPECT_EQ(s1, a.SampleSeed(p2));
  EXPECT_NE(a.SampleSeed(p1), s1);
  for (u128 e : s1.entries) EXPECT_LT(e, u128{1} << 54);

  Shprg c(ShprgParams::Preset('C', kCrs));
  Seed wide = c.SampleSeed(p1);
  EXPECT_TRUE(std::any_of(wide.entries.begin(), wide.entries.end(),
                          [](u128 e) { return e >> 64 != 0; }));
  for (u128 e : wide.entries) EXPECT_LT(e, u128{1} << 72);
}

TEST(ShprgTest, ExpandIsDeterministic) {
  Shprg g(ShprgParams::Preset('B', kCrs));
  Prng prng(SeedFromInt(14));
  Seed s = g.SampleSeed(prng);
  EXPECT_EQ(g.Expand(s, 777), Shprg(ShprgParams::Preset('B', kCrs)).Expand(s, 777));
  ShprgParams other = ShprgParams::Preset('B', DeriveSeed(kCrs, "other"));
  EXPECT_NE(g.Expand(s, 777), Shprg(other).Expand(s, 777));
}

TEST(ShprgTest, ExpandRejectsInvalidSeeds) {
  Shprg g(ShprgParams::Preset('A', kCrs));
  EXPECT_THROW(g.Expand(Seed{{1, 2, 3}}, 10), InvalidArgument);
  Seed big{std::vector<u128>(512, u128{1} << 54)};
  EXPECT_THROW(g.Expand(big, 10), InvalidArgument);
}

TEST(ShprgTest, MaskValuesPassChiSquare) {
  Shprg g(ShprgParams::Preset('A', kCrs));
  g.CacheColumns(100000);
  Prng prng(SeedFromInt(15));
  std::vector<Seed> seeds;
  for (int i = 0; i < 10; ++i) seeds.push_back(g.SampleSeed(prng));
  std::vector<std::uint64_t> counts(256, 0);
  for (const auto& m : g.ExpandMany(seeds, 100000)) {
    for (std::uint64_t v : m.values) ++counts[v >> 16];
  }
  EXPECT_TRUE(ChiSquareUniform(counts).Passes(1e-3));
}

TEST(ShprgTest, SeedWireFormat) {
  for (char setting : {'A', 'C'}) {
    ShprgParams params = ShprgParams::Preset(setting, kCrs);
    Shprg g(params);
    Prng prng(SeedFromInt(16));
    Seed s = g.SampleSeed(prng);
    ByteWriter w;
    SerializeSeed(params, s, w);
    EXPECT_EQ(w.size(), params.mu * params.entry_bytes());
    Bytes b = w.Take();
    ByteReader r(b);
    EXPECT_EQ(DeserializeSeed(params, r), s);
    EXPECT_TRUE(r.done());
  }
}

}  // namespace
}  // namespace dhsa::shprg
