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

#include "dhsa/bfv/bfv.h"

#include <string>

#include "dhsa/common/errors.h"

namespace dhsa::bfv {

using ring::Domain;
using ring::u128;

namespace {

void CheckPlaintext(const ring::RingParams& params, const Plaintext& m) {
  if (m.coeffs.size() != params.n()) {
    throw InvalidArgument("plaintext must have exactly n coefficients");
  }
  if (params.log_t() < 64) {
    const std::uint64_t t = 1ULL << params.log_t();
    for (std::size_t i = 0; i < m.coeffs.size(); ++i) {
      if (m.coeffs[i] >= t) {
        throw InvalidArgument("plaintext coefficient " + std::to_string(i) +
                              " is not below t");
      }
    }
  }
}

// round(q * m / t) reduced into each prime, i.e. Delta*m + round(r*m / t)
// with r = q mod t. The correction term matters because t does not divide q:
// with t = 2^64 the bare Delta*m would leave an error of up to t^2/q after
// scaling, far above 1/2.
RingElement ScaledMessage(const RingParamsPtr& params, const Plaintext& m) {
  const int log_t = params->log_t();
  const u128 r = params->q() - params->delta() * params->t();
  const u128 half_t = static_cast<u128>(1) << (log_t - 1);
  std::vector<u128> corr(m.coeffs.size());
  for (std::size_t j = 0; j < corr.size(); ++j) {
    corr[j] = (r * m.coeffs[j] + half_t) >> log_t;
  }
  RingElement out(params);
  for (std::size_t i = 0; i < params->num_primes(); ++i) {
    const std::uint64_t p = params->primes()[i];
    const std::uint64_t delta = static_cast<std::uint64_t>(params->delta() % p);
    auto res = out.residues(i);
    for (std::size_t j = 0; j < res.size(); ++j) {
      std::uint64_t v = ring::MulMod(delta, m.coeffs[j] % p, p);
      v += static_cast<std::uint64_t>(corr[j] % p);
      res[j] = v >= p ? v - p : v;
    }
  }
  return out;
}

// round(x * 2^k / q) mod 2^k for x in [0, q), by long division in digits as
// wide as the headroom above q allows.
std::uint64_t ScaleAndRound(u128 x, u128 q, int q_bits, int log_t) {
  const int digit = 127 - q_bits;
  u128 quotient = 0;
  u128 rem = x;
  for (int left = log_t; left > 0;) {
    const int s = std::min(digit, left);
    rem <<= s;
    const u128 d = rem / q;
    rem -= d * q;
    quotient = (quotient << s) | d;
    left -= s;
  }
  if (2 * rem >= q) ++quotient;
  const u128 mask = (static_cast<u128>(1) << log_t) - 1;
  return static_cast<std::uint64_t>(quotient & mask);
}

}  // namespace

SecretKey MakeSecretKey(RingElement s) {
  s.ConvertTo(Domain::kCoefficient);
  RingElement s_ntt = s.ToNtt();
  return SecretKey{std::move(s), std::move(s_ntt)};
}

KeyPair KeyGen(const RingParamsPtr& params, const RingElement& crs_a, Prng& prng,
               const ring::SamplerConfig& config) {
  SecretKey sk = MakeSecretKey(ring::SampleTernary(params, prng));
  RingElement a = crs_a.ToNtt();
  RingElement e = ring::SampleGaussian(params, config, prng).ToNtt();
  RingElement p0 = ring::Add(ring::Negate(ring::NegacyclicMul(sk.s_ntt, a)), e);
  return KeyPair{std::move(sk), PublicKey{std::move(p0), std::move(a)}};
}

Ciphertext Encrypt(const PublicKey& pk, const Plaintext& m, Prng& prng,
                   const ring::SamplerConfig& config) {
  const RingParamsPtr& params = pk.p0.params();
  CheckPlaintext(*params, m);
  RingElement u = ring::SampleTernary(params, prng);
  RingElement e0 = ring::SampleGaussian(params, config, prng);
  RingElement e1 = ring::SampleGaussian(params, config, prng);
  return EncryptWith(pk, m, u, e0, e1);
}

Ciphertext EncryptWith(const PublicKey& pk, const Plaintext& m, const RingElement& u,
                       const RingElement& e0, const RingElement& e1) {
  const RingParamsPtr& params = pk.p0.params();
  CheckPlaintext(*params, m);
  RingElement u_ntt = u.ToNtt();
  RingElement c0 = ring::NegacyclicMul(u_ntt, pk.p0.ToNtt()).ToCoefficient();
  ring::AddInPlace(c0, ScaledMessage(params, m));
  ring::AddInPlace(c0, e0.ToCoefficient());
  RingElement c1 = ring::NegacyclicMul(u_ntt, pk.p1.ToNtt()).ToCoefficient();
  ring::AddInPlace(c1, e1.ToCoefficient());
  return Ciphertext{std::move(c0), std::move(c1)};
}

RingElement Phase(const SecretKey& sk, const Ciphertext& ct) {
  RingElement x = ring::NegacyclicMul(ct.c1.ToNtt(), sk.s_ntt).ToCoefficient();
  ring::AddInPlace(x, ct.c0.ToCoefficient());
  return x;
}

Plaintext Decrypt(const SecretKey& sk, const Ciphertext& ct) {
  const ring::RingParams& params = *ct.params();
  std::vector<u128> lifted = ring::CrtLift(Phase(sk, ct));
  Plaintext m;
  m.coeffs.resize(lifted.size());
  for (std::size_t j = 0; j < lifted.size(); ++j) {
    m.coeffs[j] = ScaleAndRound(lifted[j], params.q(), params.q_bits(), params.log_t());
  }
  return m;
}

Ciphertext Add(const Ciphertext& a, const Ciphertext& b) {
  Ciphertext r = a;
  AddInPlace(r, b);
  return r;
}

void AddInPlace(Ciphertext& acc, const Ciphertext& b) {
  ring::AddInPlace(acc.c0, b.c0);
  ring::AddInPlace(acc.c1, b.c1);
}

Plaintext Encode(const ring::RingParams& params, std::span<const std::uint64_t> values) {
  if (values.size() > params.n()) {
    throw InvalidArgument("cannot encode " + std::to_string(values.size()) +
                          " values into a degree-" + std::to_string(params.n()) +
                          " plaintext");
  }
  Plaintext m;
  m.coeffs.assign(params.n(), 0);
  std::copy(values.begin(), values.end(), m.coeffs.begin());
  CheckPlaintext(params, m);
  return m;
}

std::vector<std::uint64_t> Decode(const Plaintext& pt, std::size_t count) {
  if (count > pt.coeffs.size()) throw InvalidArgument("decode count exceeds n");
  return {pt.coeffs.begin(), pt.coeffs.begin() + static_cast<std::ptrdiff_t>(count)};
}

u128 NoiseInfNorm(const SecretKey& sk, const Ciphertext& ct, const Plaintext& m) {
  const RingParamsPtr& params = ct.params();
  RingElement noise = ring::Sub(Phase(sk, ct), ScaledMessage(params, m));
  u128 worst = 0;
  for (ring::i128 v : ring::CenteredLift(noise)) {
    u128 a = static_cast<u128>(v < 0 ? -v : v);
    if (a > worst) worst = a;
  }
  return worst;
}

void SerializeCiphertext(const Ciphertext& ct, ByteWriter& out) {
  out.PutU8(kCiphertextTag);
  ring::Serialize(ct.c0, out);
  ring::Serialize(ct.c1, out);
}

Ciphertext DeserializeCiphertext(const RingParamsPtr& params, ByteReader& in) {
  if (in.GetU8() != kCiphertextTag) throw ProtocolError("bad ciphertext tag");
  RingElement c0 = ring::Deserialize(params, in);
  RingElement c1 = ring::Deserialize(params, in);
  return Ciphertext{std::move(c0), std::move(c1)};
}

std::size_t CiphertextSize(const ring::RingParams& params) {
  return 1 + 2 * ring::SerializedSize(params);
}

void SerializePublicKey(const PublicKey& pk, ByteWriter& out) {
  ring::Serialize(pk.p0, out);
  ring::Serialize(pk.p1, out);
}

PublicKey DeserializePublicKey(const RingParamsPtr& params, ByteReader& in) {
  RingElement p0 = ring::Deserialize(params, in);
  RingElement p1 = ring::Deserialize(params, in);
  p0.ConvertTo(Domain::kNtt);
  p1.ConvertTo(Domain::kNtt);
  return PublicKey{std::move(p0), std::move(p1)};
}

void SerializeSecretKey(const SecretKey& sk, ByteWriter& out) { ring::Serialize(sk.s, out); }

SecretKey DeserializeSecretKey(const RingParamsPtr& params, ByteReader& in) {
  return MakeSecretKey(ring::Deserialize(params, in));
}

}  // namespace dhsa::bfv
