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

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "dhsa/codec/codec.h"
#include "dhsa/common/errors.h"
#include "gtest/gtest.h"

namespace dhsa::codec {
namespace {

using shprg::MaskStream;
using shprg::Seed;
using shprg::Shprg;
using shprg::ShprgParams;
using shprg::u128;

QuantParams Params(std::uint64_t n, std::uint64_t p = std::uint64_t{1} << 24) {
  QuantParams qp;
  qp.w = 16;
  qp.m_min = -1.0;
  qp.m_max = 1.0;
  qp.num_parties = n;
  qp.p = p;
  return qp;
}

std::vector<double> RandomUpdate(Prng& prng, std::size_t m, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(m);
  for (auto& x : v) x = lo + (hi - lo) * prng.UniformUnit();
  return v;
}

TEST(QuantizeTest, FormulaValues) {
  QuantParams qp = Params(1);
  std::vector<double> m = {-1.0, 0.0, 1.0, 7.5, -3.0};
  QuantizeResult r = Quantize(m, qp);
  EXPECT_EQ(r.x.values, (std::vector<std::uint64_t>{0, 32768, 65535, 65535, 0}));
  EXPECT_EQ(r.clipped, 3u);
}

TEST(QuantizeTest, RejectsNonFiniteNamingIndex) {
  std::vector<double> m = {0.0, 0.5, std::numeric_limits<double>::quiet_NaN()};
  try {
    Quantize(m, Params(1));
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("index 2"), std::string::npos);
  }
  m[2] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Quantize(m, Params(1)), InvalidArgument);
}

TEST(QuantizeTest, ParamsValidation) {
  EXPECT_NO_THROW(Params(256).Validate());
  try {
    Params(257).Validate();
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("p > N(2^w-1)"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("at most 256"), std::string::npos);
  }
  EXPECT_NO_THROW(Params(65536, std::uint64_t{1} << 32).Validate());
  QuantParams bad = Params(2);
  bad.m_max = bad.m_min;
  EXPECT_THROW(bad.Validate(), InvalidArgument);
  bad = Params(2, 3000);
  EXPECT_THROW(bad.Validate(), InvalidArgument);
}

TEST(DequantizeTest, FormulaValues) {
  QuantParams qp = Params(4);
  std::vector<std::int64_t> x = {4 * 32768, 0};
  std::vector<double> m = Dequantize(x, qp);
  EXPECT_DOUBLE_EQ(m[0], 0.0);
  EXPECT_DOUBLE_EQ(m[1], -4.0);
  std::vector<std::int64_t> over = {4 * 65535 + 1};
  EXPECT_THROW(Dequantize(over, qp), ProtocolError);
}

TEST(DequantizeTest, SumRoundtripWithinQuantizationStep) {
  Prng prng(SeedFromInt(21));
  for (std::uint64_t n : {1u, 2u, 4u, 17u}) {
    QuantParams qp = Params(n);
    const std::size_t m = 2000;
    std::vector<std::int64_t> sum(m, 0);
    std::vector<double> exact(m, 0.0);
    for (std::uint64_t u = 0; u < n; ++u) {
      auto v = RandomUpdate(prng, m);
      auto q = Quantize(v, qp).x;
      for (std::size_t i = 0; i < m; ++i) {
        sum[i] += static_cast<std::int64_t>(q.values[i]);
        exact[i] += v[i];
      }
    }
    auto back = Dequantize(sum, qp);
    const double bound = static_cast<double>(n) * qp.step();
    for (std::size_t i = 0; i < m; ++i) ASSERT_LE(std::abs(back[i] - exact[i]), bound);
  }
}

TEST(MaskTest, ZeroMaskIsIdentity) {
  QuantizedVector x{{1, 2, 65535, 0}};
  MaskStream g{{0, 0, 0, 0}};
  EXPECT_EQ(Mask(x, g, 1u << 24).values, x.values);
  MaskStream short_g{{0, 0}};
  EXPECT_THROW(Mask(x, short_g, 1u << 24), InvalidArgument);
}

TEST(MaskTest, UnmaskMapsNoiseWindowToNegatives) {
  const std::uint64_t p = 1u << 24;
  MaskedVector y0{{5, 0, 0, p - 1}};
  MaskStream g0{{7, 1, 2, 0}};
  // (5-7), (0-1), (0-2) fall in the window; p-1 with N=3 also does.
  EXPECT_EQ(Unmask(y0, g0, p, 3), (std::vector<std::int64_t>{-2, -1, -2, -1}));
  MaskedVector y1{{p - 3}};
  MaskStream z{{0}};
  EXPECT_EQ(Unmask(y1, z, p, 3), (std::vector<std::int64_t>{static_cast<std::int64_t>(p - 3)}));
}

struct Pipeline {
  std::vector<std::int64_t> x0;
  std::vector<std::int64_t> exact;
};

Pipeline RunPipeline(const Shprg& g, const QuantParams& qp, std::size_t m, Prng& prng,
                     bool zero_inputs) {
  std::vector<Seed> seeds;
  MaskedVector y0{std::vector<std::uint64_t>(m, 0)};
  Pipeline out;
  out.exact.assign(m, 0);
  for (std::uint64_t u = 0; u < qp.num_parties; ++u) {
    seeds.push_back(g.SampleSeed(prng));
    QuantizedVector x = zero_inputs ? QuantizedVector{std::vector<std::uint64_t>(m, 0)}
                                    : Quantize(RandomUpdate(prng, m), qp).x;
    for (std::size_t i = 0; i < m; ++i) out.exact[i] += static_cast<std::int64_t>(x.values[i]);
    AddMasked(y0, Mask(x, g.Expand(seeds.back(), m), qp.p), qp.p);
  }
  out.x0 = Unmask(y0, g.Expand(g.AddSeeds(seeds), m), qp.p, qp.num_parties);
  return out;
}

TEST(MaskTest, ThreePartyPipelineErrorWithinTwo) {
  Shprg g(ShprgParams::Preset('A', DeriveSeed(SeedFromInt(22), "crs")));
  Prng prng(SeedFromInt(23));
  for (int trial = 0; trial < 50; ++trial) {
    for (bool zero : {false, true}) {
      Pipeline r = RunPipeline(g, Params(3), 8, prng, zero);
      for (std::size_t i = 0; i < 8; ++i) {
        const std::int64_t e = r.x0[i] - r.exact[i];
        ASSERT_GE(e, -2);
        ASSERT_LE(e, 2);
      }
    }
  }
}

TEST(MaskTest, DequantizedAggregateWithinCombinedBound) {
  Shprg g(ShprgParams::Preset('A', DeriveSeed(SeedFromInt(24), "crs")));
  Prng prng(SeedFromInt(25));
  for (std::uint64_t n : {2u, 8u, 64u}) {
    QuantParams qp = Params(n);
    const std::size_t m = 300;
    std::vector<std::vector<double>> updates;
    std::vector<Seed> seeds;
    MaskedVector y0{std::vector<std::uint64_t>(m, 0)};
    std::vector<double> exact(m, 0.0);
    for (std::uint64_t u = 0; u < n; ++u) {
      auto v = RandomUpdate(prng, m);
      for (std::size_t i = 0; i < m; ++i) exact[i] += v[i];
      seeds.push_back(g.SampleSeed(prng));
      AddMasked(y0, Mask(Quantize(v, qp).x, g.Expand(seeds.back(), m), qp.p), qp.p);
    }
    auto m0 = Dequantize(Unmask(y0, g.Expand(g.AddSeeds(seeds), m), qp.p, n), qp);
    const double bound = static_cast<double>(2 * n - 1) * qp.step();
    for (std::size_t i = 0; i < m; ++i) ASSERT_LE(std::abs(m0[i] - exact[i]), bound);
  }
}

TEST(PackTest, ArrayCounts) {
  EXPECT_EQ(PackedArrayCount(512, 100, 4096), 13u);
  EXPECT_EQ(PackedArrayCount(512, 8, 4096), 1u);
  EXPECT_EQ(PackedArrayCount(512, 9, 4096), 2u);
  EXPECT_EQ(PackedArrayCount(1024, 1, 4096), 1u);
}

TEST(PackTest, RoundtripAndPadding) {
  Shprg g(ShprgParams::Preset('A', DeriveSeed(SeedFromInt(26), "crs")));
  Prng prng(SeedFromInt(27));
  std::vector<Seed> seeds;
  for (int t = 0; t < 100; ++t) seeds.push_back(g.SampleSeed(prng));
  auto arrays = PackSeeds(seeds, 4096);
  ASSERT_EQ(arrays.size(), 13u);
  for (const auto& a : arrays) EXPECT_EQ(a.size(), 4096u);
  // Epoch-major: seed t entry i sits at flat index 512 t + i.
  EXPECT_EQ(arrays[0][512 + 3], static_cast<std::uint64_t>(seeds[1].entries[3]));
  EXPECT_EQ(arrays[12][2047], static_cast<std::uint64_t>(seeds[99].entries[511]));
  for (std::size_t j = 2048; j < 4096; ++j) ASSERT_EQ(arrays[12][j], 0u);
  EXPECT_EQ(UnpackSeeds(arrays, 512, 100), seeds);
  EXPECT_THROW(UnpackSeeds(arrays, 512, 120), InvalidArgument);

  std::vector<Seed> eight(seeds.begin(), seeds.begin() + 8);
  auto one = PackSeeds(eight, 4096);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0][4095], static_cast<std::uint64_t>(eight[7].entries[511]));
  EXPECT_EQ(UnpackSeeds(one, 512, 8), eight);
}

TEST(PackTest, RejectsWideEntries) {
  std::vector<Seed> seeds = {Seed{{u128{1} << 70, 1}}};
  EXPECT_THROW(PackSeeds(seeds, 8), InvalidArgument);
}

TEST(PackTest, SeedSumModTReducesToSumModQ) {
  // q = 2^54 divides t = 2^64.
  Shprg g(ShprgParams::Preset('A', DeriveSeed(SeedFromInt(28), "crs")));
  Prng prng(SeedFromInt(29));
  for (std::size_t n : {1u, 3u, 300u}) {
    std::vector<Seed> seeds;
    std::vector<std::uint64_t> mod_t(512, 0);
    for (std::size_t u = 0; u < n; ++u) {
      seeds.push_back(g.SampleSeed(prng));
      for (std::size_t i = 0; i < 512; ++i) mod_t[i] += static_cast<std::uint64_t>(seeds.back().entries[i]);
    }
    Seed via_t{std::vector<u128>(mod_t.begin(), mod_t.end())};
    EXPECT_EQ(g.Reduce(via_t), g.AddSeeds(seeds));
  }
}

TEST(MaskedWireTest, SizesAndRoundtrip) {
  EXPECT_EQ(MaskedSize(100000, 24), 300000u);
  EXPECT_EQ(MaskedSize(100000, 20), 250000u);
  EXPECT_EQ(MaskedSize(100000, 32), 400000u);
  Prng prng(SeedFromInt(30));
  MaskedVector y;
  for (int i = 0; i < 1001; ++i) y.values.push_back(prng.UniformBelow(1u << 20));
  ByteWriter w;
  SerializeMasked(y, 20, w);
  EXPECT_EQ(w.size(), MaskedSize(1001, 20));
  Bytes b = w.Take();
  ByteReader r(b);
  EXPECT_EQ(DeserializeMasked(r, 1001, 20), y);
  EXPECT_TRUE(r.done());
}

}  // namespace
}  // namespace dhsa::codec
