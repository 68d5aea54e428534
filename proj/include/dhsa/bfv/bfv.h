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

#ifndef DHSA_BFV_BFV_H_
#define DHSA_BFV_BFV_H_

#include <cstdint>
#include <span>
#include <vector>

#include "dhsa/common/bytes.h"
#include "dhsa/common/prng.h"
#include "dhsa/ring/ring.h"
#include "dhsa/ring/sampler.h"

// Additive-only BFV over R_q with plaintext space R_t, t = 2^k.
namespace dhsa::bfv {

using ring::RingElement;
using ring::RingParamsPtr;

struct SecretKey {
  RingElement s;      // ternary, coefficient domain
  RingElement s_ntt;  // cached transform of s
};

// pk = (p0, p1) = (-s*a + e, a). Both components are kept in the NTT domain.
struct PublicKey {
  RingElement p0;
  RingElement p1;

  bool operator==(const PublicKey&) const = default;
};

struct KeyPair {
  SecretKey sk;
  PublicKey pk;
};

// m in R_t: exactly n coefficients in [0, t).
struct Plaintext {
  std::vector<std::uint64_t> coeffs;

  bool operator==(const Plaintext&) const = default;
};

// ct = (c0, c1) in the coefficient domain.
struct Ciphertext {
  RingElement c0;
  RingElement c1;

  const RingParamsPtr& params() const { return c0.params(); }
  bool operator==(const Ciphertext&) const = default;
};

SecretKey MakeSecretKey(RingElement s);

KeyPair KeyGen(const RingParamsPtr& params, const RingElement& crs_a, Prng& prng,
               const ring::SamplerConfig& config = {});

// Throws InvalidArgument if m has the wrong length or a coefficient >= t.
Ciphertext Encrypt(const PublicKey& pk, const Plaintext& m, Prng& prng,
                   const ring::SamplerConfig& config = {});

// Encryption with caller-chosen randomness (u ternary, e0/e1 errors).
Ciphertext EncryptWith(const PublicKey& pk, const Plaintext& m, const RingElement& u,
                       const RingElement& e0, const RingElement& e1);

// m = [ round(t/q * [c0 + c1*s]_q) ]_t with round-half-up.
Plaintext Decrypt(const SecretKey& sk, const Ciphertext& ct);

// [c0 + c1*s]_q in the coefficient domain.
RingElement Phase(const SecretKey& sk, const Ciphertext& ct);

Ciphertext Add(const Ciphertext& a, const Ciphertext& b);
void AddInPlace(Ciphertext& acc, const Ciphertext& b);

// Coefficient packing: values go to coefficients 0..size-1, zero above.
Plaintext Encode(const ring::RingParams& params, std::span<const std::uint64_t> values);
std::vector<std::uint64_t> Decode(const Plaintext& pt, std::size_t count);

// Infinity norm of the centered noise c0 + c1*s - Delta*m. Needs the secret
// key and the expected plaintext, so it is a measurement tool for tests and
// reports, not something a party can evaluate on foreign ciphertexts.
ring::u128 NoiseInfNorm(const SecretKey& sk, const Ciphertext& ct, const Plaintext& m);

// Wire formats. A ciphertext is a one-byte tag followed by c0 and c1.
inline constexpr std::uint8_t kCiphertextTag = 0x43;
void SerializeCiphertext(const Ciphertext& ct, ByteWriter& out);
Ciphertext DeserializeCiphertext(const RingParamsPtr& params, ByteReader& in);
std::size_t CiphertextSize(const ring::RingParams& params);

void SerializePublicKey(const PublicKey& pk, ByteWriter& out);
PublicKey DeserializePublicKey(const RingParamsPtr& params, ByteReader& in);

void SerializeSecretKey(const SecretKey& sk, ByteWriter& out);
SecretKey DeserializeSecretKey(const RingParamsPtr& params, ByteReader& in);

}  // namespace dhsa::bfv

#endif  // DHSA_BFV_BFV_H_
