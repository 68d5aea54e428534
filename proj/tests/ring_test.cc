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
#include <vector>

#include "dhsa/common/errors.h"
#include "dhsa/common/prng.h"
#include "dhsa/ring/ring.h"
#include "dhsa/ring/sampler.h"
#include "gtest/gtest.h"

namespace dhsa::ring {
namespace {

constexpr std::uint64_t kP0 = 36028797018652673ULL;
constexpr std::uint64_t kP1 = 18014398509309953ULL;

Prng TestPrng(std::string_view label) { return Prng(DeriveSeed(SeedFromInt(7), label)); }

// Schoolbook product in Z_q[X]/(X^n + 1), with plain 128-bit arithmetic. q
// must be below 2^63 so that products fit.
std::vector<u128> SchoolbookNegacyclic(const std::vector<u128>& a,
                                       const std::vector<u128>& b, u128 q) {
  const std::size_t n = a.size();
  std::vector<u128> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      u128 prod = a[i] * b[j] % q;
      std::size_t k = i + j;
      if (k < n) {
        out[k] = (out[k] + prod) % q;
      } else {
        out[k - n] = (out[k - n] + q - prod) % q;
      }
    }
  }
  return out;
}

std::vector<u128> RandomWide(std::size_t n, u128 q, Prng& prng) {
  std::vector<u128> v(n);
  for (auto& x : v) x = prng.UniformBelow128(q);
  return v;
}

TEST(RingParamsTest, DefaultIs109BitTwoPrimeRing) {
  auto params = RingParams::Default();
  EXPECT_EQ(params->n(), 4096u);
  EXPECT_EQ(params->q_bits(), 109);
  EXPECT_EQ(params->log_t(), 64);
  for (std::uint64_t p : params->primes()) {
    EXPECT_TRUE(IsPrime(p));
    EXPECT_EQ((p - 1) % 8192, 0u);
    EXPECT_LT(p, 1ULL << 56);
  }
  EXPECT_LE(params->delta() * params->t(), params->q());
  EXPECT_LT(params->q(), (params->delta() + 1) * params->t());
}

TEST(RingParamsTest, RejectsBadParameters) {
  EXPECT_THROW(RingParams::Create(6, {17}, 2), InvalidArgument);
  EXPECT_THROW(RingParams::Create(8, {19}, 2), InvalidArgument);   // 19 != 1 mod 16
  EXPECT_THROW(RingParams::Create(8, {33}, 2), InvalidArgument);   // not prime
  EXPECT_THROW(RingParams::Create(4, {17, 17}, 2), InvalidArgument);
  EXPECT_THROW(RingParams::Create(4, {17}, 5), InvalidArgument);   // t >= q
}

TEST(RingTest, AddIdentityAndInverse) {
  auto params = RingParams::Create(4, {17}, 2);
  std::vector<std::int64_t> a_coeffs = {1, 2, 3, 4};
  std::vector<std::int64_t> b_coeffs = {16, 15, 14, 13};
  auto a = RingElement::FromSigned(params, a_coeffs);
  auto b = RingElement::FromSigned(params, b_coeffs);
  EXPECT_EQ(Add(a, RingElement(params)), a);
  EXPECT_EQ(Add(a, b), RingElement(params));
}

TEST(RingTest, AddMatchesBigIntegerOracle) {
  auto params = RingParams::Create(8, {17, 97}, 2);
  Prng prng = TestPrng("add");
  for (int trial = 0; trial < 50; ++trial) {
    auto av = RandomWide(8, params->q(), prng);
    auto bv = RandomWide(8, params->q(), prng);
    auto sum = CrtLift(Add(RingElement::FromWide(params, av), RingElement::FromWide(params, bv)));
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(sum[i], (av[i] + bv[i]) % params->q());
  }
}

TEST(RingTest, RejectsMismatchedOperands) {
  auto p4 = RingParams::Create(4, {17}, 2);
  auto p8 = RingParams::Create(8, {17}, 2);
  EXPECT_THROW(Add(RingElement(p4), RingElement(p8)), InvalidArgument);
  EXPECT_THROW(Add(RingElement(p4), RingElement(p4, Domain::kNtt)), InvalidArgument);
  EXPECT_THROW(NegacyclicMul(RingElement(p4), RingElement(p8)), InvalidArgument);
}

TEST(RingTest, WraparoundFlipsSign) {
  auto params = RingParams::Create(4, {17}, 2);
  std::vector<std::int64_t> x = {0, 1, 0, 0};
  std::vector<std::int64_t> x3 = {0, 0, 0, 1};
  auto prod = NegacyclicMul(RingElement::FromSigned(params, x),
                            RingElement::FromSigned(params, x3));
  auto lifted = CrtLift(prod);
  EXPECT_EQ(lifted[0], params->q() - 1);
  EXPECT_EQ(lifted[1], 0u);
  EXPECT_EQ(lifted[2], 0u);
  EXPECT_EQ(lifted[3], 0u);
}

TEST(RingTest, MultiplicativeIdentity) {
  auto params = RingParams::Default();
  Prng prng = TestPrng("identity");
  auto a = SampleUniform(params, prng);
  std::vector<std::int64_t> one(params->n(), 0);
  one[0] = 1;
  EXPECT_EQ(NegacyclicMul(a, RingElement::FromSigned(params, one)), a);
}

TEST(RingTest, NegacyclicMulMatchesSchoolbookSmallRing) {
  auto params = RingParams::Create(8, {17, 97}, 2);
  Prng prng = TestPrng("schoolbook-small");
  for (int trial = 0; trial < 200; ++trial) {
    auto av = RandomWide(8, params->q(), prng);
    auto bv = RandomWide(8, params->q(), prng);
    auto got = CrtLift(NegacyclicMul(RingElement::FromWide(params, av),
                                     RingElement::FromWide(params, bv)));
    EXPECT_EQ(got, SchoolbookNegacyclic(av, bv, params->q()));
  }
}

TEST(RingTest, NegacyclicMulMatchesSchoolbookPerPrime) {
  // Default primes at a reduced degree; check each residue independently.
  auto params = RingParams::Create(64, {kP0, kP1}, 64);
  Prng prng = TestPrng("schoolbook-wide");
  auto av = RandomWide(64, params->q(), prng);
  auto bv = RandomWide(64, params->q(), prng);
  auto prod = NegacyclicMul(RingElement::FromWide(params, av), RingElement::FromWide(params, bv));
  for (std::size_t i = 0; i < 2; ++i) {
    const u128 p = params->primes()[i];
    std::vector<u128> ai(64), bi(64);
    for (std::size_t j = 0; j < 64; ++j) {
      ai[j] = av[j] % p;
      bi[j] = bv[j] % p;
    }
    auto expect = SchoolbookNegacyclic(ai, bi, p);
    auto res = prod.residues(i);
    for (std::size_t j = 0; j < 64; ++j) EXPECT_EQ(static_cast<u128>(res[j]), expect[j]);
  }
}

TEST(RingTest, NttRoundTrip) {
  auto params = RingParams::Default();
  Prng prng = TestPrng("ntt");
  for (int trial = 0; trial < 5; ++trial) {
    auto a = SampleUniform(params, prng);
    EXPECT_EQ(a.ToNtt().ToCoefficient(), a);
  }
}

TEST(RingTest, AlgebraicLawsOnRandomTriples) {
  auto params = RingParams::Create(8, {17, 97}, 2);
  Prng prng = TestPrng("laws");
  for (int trial = 0; trial < 100; ++trial) {
    auto a = RingElement::FromWide(params, RandomWide(8, params->q(), prng));
    auto b = RingElement::FromWide(params, RandomWide(8, params->q(), prng));
    auto c = RingElement::FromWide(params, RandomWide(8, params->q(), prng));
    EXPECT_EQ(Add(a, b), Add(b, a));
    EXPECT_EQ(Add(Add(a, b), c), Add(a, Add(b, c)));
    EXPECT_EQ(NegacyclicMul(a, b), NegacyclicMul(b, a));
    EXPECT_EQ(NegacyclicMul(NegacyclicMul(a, b), c), NegacyclicMul(a, NegacyclicMul(b, c)));
    EXPECT_EQ(NegacyclicMul(a, Add(b, c)), Add(NegacyclicMul(a, b), NegacyclicMul(a, c)));
  }
}

TEST(RingTest, NttDomainProductStaysInNtt) {
  auto params = RingParams::Create(8, {17, 97}, 2);
  Prng prng = TestPrng("domain");
  auto a = SampleUniform(params, prng);
  auto b = SampleUniform(params, prng);
  auto prod = NegacyclicMul(a.ToNtt(), b.ToNtt());
  EXPECT_EQ(prod.domain(), Domain::kNtt);
  EXPECT_EQ(prod.ToCoefficient(), NegacyclicMul(a, b));
}

TEST(CrtLiftTest, SmallExamples) {
  auto params = RingParams::Create(8, {17, 97}, 2);
  EXPECT_EQ(CrtLift(RingElement(params)), std::vector<u128>(8, 0));

  RingElement a(params);
  a.residues(0)[0] = 4;
  a.residues(1)[0] = 4;
  a.residues(0)[1] = 0;
  a.residues(1)[1] = 17;
  auto lifted = CrtLift(a);
  EXPECT_EQ(lifted[0], 4u);
  // Exhaustive search over [0, 1649): x = 0 mod 17, x = 17 mod 97.
  u128 expect = 0;
  for (u128 x = 0; x < 1649; ++x) {
    if (x % 17 == 0 && x % 97 == 17) expect = x;
  }
  EXPECT_EQ(expect, 17u);
  EXPECT_EQ(lifted[1], expect);
}

TEST(CrtLiftTest, ReproducesResidues) {
  auto params = RingParams::Default();
  Prng prng = TestPrng("crt");
  auto a = SampleUniform(params, prng);
  auto lifted = CrtLift(a);
  for (std::size_t j = 0; j < params->n(); ++j) {
    ASSERT_LT(lifted[j], params->q());
    for (std::size_t i = 0; i < 2; ++i) {
      ASSERT_EQ(static_cast<std::uint64_t>(lifted[j] % params->primes()[i]), a.residues(i)[j]);
    }
  }
}

TEST(SerializationTest, RoundTripAndSize) {
  auto params = RingParams::Default();
  Prng prng = TestPrng("serialize");
  auto a = SampleUniform(params, prng);
  for (Domain d : {Domain::kCoefficient, Domain::kNtt}) {
    RingElement x = d == Domain::kNtt ? a.ToNtt() : a;
    ByteWriter w;
    Serialize(x, w);
    Bytes bytes = w.Take();
    EXPECT_EQ(bytes.size(), SerializedSize(*params));
    EXPECT_EQ(bytes.size(), 6 + 4096 * 109 / 8);
    ByteReader r(bytes);
    EXPECT_EQ(Deserialize(params, r), x);
    EXPECT_TRUE(r.done());
  }
}

TEST(SerializationTest, RejectsHeaderMismatchAndTruncation) {
  auto params = RingParams::Default();
  auto small = RingParams::Create(8, {17, 97}, 2);
  ByteWriter w;
  Serialize(RingElement(small), w);
  Bytes bytes = w.Take();
  ByteReader r(bytes);
  EXPECT_THROW(Deserialize(params, r), ProtocolError);
  bytes.pop_back();
  ByteReader r2(bytes);
  EXPECT_THROW(Deserialize(small, r2), ProtocolError);
}

TEST(SamplerTest, DeterministicUnderFixedSeed) {
  auto params = RingParams::Default();
  Prng a = TestPrng("det");
  Prng b = TestPrng("det");
  EXPECT_EQ(SampleUniform(params, a), SampleUniform(params, b));
  EXPECT_EQ(SampleTernary(params, a), SampleTernary(params, b));
  EXPECT_EQ(SampleGaussian(params, {}, a), SampleGaussian(params, {}, b));
}

TEST(SamplerTest, TernarySupport) {
  auto params = RingParams::Default();
  Prng prng = TestPrng("ternary");
  auto s = CenteredLift(SampleTernary(params, prng));
  int counts[3] = {0, 0, 0};
  for (i128 v : s) {
    ASSERT_GE(v, -1);
    ASSERT_LE(v, 1);
    ++counts[static_cast<int>(v) + 1];
  }
  for (int c : counts) EXPECT_GT(c, 1200);
}

TEST(SamplerTest, ConfigValidation) {
  EXPECT_THROW((SamplerConfig{0.0, 20}.Validate()), InvalidArgument);
  EXPECT_THROW((SamplerConfig{3.2, 19}.Validate()), InvalidArgument);
  EXPECT_NO_THROW((SamplerConfig{3.2, 20}.Validate()));
}

// Independent reference: rejection sampling from the truncated support.
std::int64_t RejectionGaussian(double sigma, int bound, Prng& prng) {
  for (;;) {
    std::int64_t x = static_cast<std::int64_t>(prng.UniformBelow(2 * bound + 1)) - bound;
    double accept = std::exp(-static_cast<double>(x * x) / (2 * sigma * sigma));
    if (prng.UniformUnit() < accept) return x;
  }
}

TEST(SamplerTest, GaussianMomentsAndShape) {
  constexpr int kDraws = 1000000;
  SamplerConfig config;
  DiscreteGaussian dist(config);
  Prng prng = TestPrng("gaussian");
  Prng oracle_prng = TestPrng("gaussian-oracle");
  std::vector<double> hist(41, 0), oracle_hist(41, 0);
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < kDraws; ++i) {
    std::int64_t x = dist.Sample(prng);
    ASSERT_LE(std::abs(x), 20);
    sum += x;
    sum_sq += static_cast<double>(x) * x;
    hist[x + 20] += 1;
    oracle_hist[RejectionGaussian(3.2, 20, oracle_prng) + 20] += 1;
  }
  double mean = sum / kDraws;
  double sd = std::sqrt(sum_sq / kDraws - mean * mean);
  EXPECT_LT(std::abs(mean), 0.05);
  EXPECT_LT(std::abs(sd - 3.2) / 3.2, 0.05);
  // Two-sample comparison per bucket within 5 standard errors.
  for (int k = 0; k < 41; ++k) {
    double se = std::sqrt(hist[k] + oracle_hist[k]) + 1.0;
    EXPECT_LT(std::abs(hist[k] - oracle_hist[k]), 5 * se) << "value " << k - 20;
  }
}

}  // namespace
}  // namespace dhsa::ring
