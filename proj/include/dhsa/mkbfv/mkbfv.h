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

#ifndef DHSA_MKBFV_MKBFV_H_
#define DHSA_MKBFV_MKBFV_H_

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "dhsa/bfv/bfv.h"

// Compact multi-key BFV: parties share the CRS polynomial a, encrypt under the
// sum of their public keys, and re-encrypt aggregates toward an output key
// through a one-round public key switch.
namespace dhsa::mkbfv {

using PartyId = std::uint32_t;

// Same layout as a BFV public key; decrypts under sk = sum of party secrets.
using CommonPublicKey = bfv::PublicKey;

struct KeySwitchShare {
  ring::RingElement h0;
  ring::RingElement h1;
  PartyId party = 0;

  bool operator==(const KeySwitchShare&) const = default;
};

struct ReEncKeyPair {
  bfv::SecretKey sk_r;
  bfv::PublicKey pk_r;
};

// cpk = (sum p0_i, a). Throws InvalidArgument on an empty list or when the
// shares disagree on the CRS polynomial.
CommonPublicKey CombinePublicKeys(std::span<const bfv::PublicKey> shares);

// h0 = s_i*c1 + u_i*p0' + e0, h1 = u_i*p1' + e1 with fresh u_i, e0, e1.
KeySwitchShare PksShare(const bfv::SecretKey& sk_i, const bfv::Ciphertext& ct,
                        const bfv::PublicKey& pk_r, PartyId party, Prng& prng,
                        const ring::SamplerConfig& config = {});

// Same with caller-chosen randomness.
KeySwitchShare PksShareWith(const bfv::SecretKey& sk_i, const bfv::Ciphertext& ct,
                            const bfv::PublicKey& pk_r, PartyId party,
                            const ring::RingElement& u, const ring::RingElement& e0,
                            const ring::RingElement& e1);

// ct' = (c0 + sum h0_j, sum h1_j). Requires exactly one share from every
// party in `parties`; throws InvalidArgument naming the missing, duplicate or
// unregistered party.
bfv::Ciphertext PksMerge(const bfv::Ciphertext& ct, std::span<const KeySwitchShare> shares,
                         std::span<const PartyId> parties);

// Incremental form of PksMerge for shares arriving one at a time.
class PksAccumulator {
 public:
  PksAccumulator(ring::RingParamsPtr params, std::span<const PartyId> parties);

  // Throws InvalidArgument for an unregistered or duplicate party.
  void Add(const KeySwitchShare& share);

  bool complete() const { return received_.size() == registered_.size(); }
  std::vector<PartyId> Missing() const;

  // (c0 + sum h0, sum h1); throws InvalidArgument naming a missing party.
  bfv::Ciphertext Finish(const bfv::Ciphertext& ct) const;

 private:
  std::set<PartyId> registered_;
  std::set<PartyId> received_;
  ring::RingElement h0_;
  ring::RingElement h1_;
};

ReEncKeyPair GenReEncKeyPair(const ring::RingParamsPtr& params, const ring::RingElement& crs_a,
                             Prng& prng, const ring::SamplerConfig& config = {});

// Encrypts a uniformly random probe under pk_r and checks that sk_r recovers it.
bool VerifyReEnc(const ReEncKeyPair& kp, Prng& prng, const ring::SamplerConfig& config = {});

// Party id (u32) followed by h0 and h1.
void SerializeShare(const KeySwitchShare& share, ByteWriter& out);
KeySwitchShare DeserializeShare(const ring::RingParamsPtr& params, ByteReader& in);

}  // namespace dhsa::mkbfv

#endif  // DHSA_MKBFV_MKBFV_H_
