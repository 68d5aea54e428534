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

#include "dhsa/mkbfv/mkbfv.h"

#include <set>
#include <string>

#include "dhsa/common/errors.h"

namespace dhsa::mkbfv {

using ring::Domain;
using ring::RingElement;

CommonPublicKey CombinePublicKeys(std::span<const bfv::PublicKey> shares) {
  if (shares.empty()) throw InvalidArgument("no public key shares to combine");
  CommonPublicKey cpk = shares.front();
  for (std::size_t i = 1; i < shares.size(); ++i) {
    if (!(shares[i].p1 == cpk.p1)) {
      throw InvalidArgument("public key share " + std::to_string(i) +
                            " uses a different CRS polynomial");
    }
    ring::AddInPlace(cpk.p0, shares[i].p0);
  }
  return cpk;
}

KeySwitchShare PksShare(const bfv::SecretKey& sk_i, const bfv::Ciphertext& ct,
                        const bfv::PublicKey& pk_r, PartyId party, Prng& prng,
                        const ring::SamplerConfig& config) {
  const auto& params = ct.params();
  RingElement u = ring::SampleTernary(params, prng);
  RingElement e0 = ring::SampleGaussian(params, config, prng);
  RingElement e1 = ring::SampleGaussian(params, config, prng);
  return PksShareWith(sk_i, ct, pk_r, party, u, e0, e1);
}

KeySwitchShare PksShareWith(const bfv::SecretKey& sk_i, const bfv::Ciphertext& ct,
                            const bfv::PublicKey& pk_r, PartyId party, const RingElement& u,
                            const RingElement& e0, const RingElement& e1) {
  RingElement u_ntt = u.ToNtt();
  // s_i*c1 + u*p0' is accumulated in the NTT domain before one inverse.
  RingElement h0 = ring::NegacyclicMul(ct.c1.ToNtt(), sk_i.s_ntt);
  ring::AddInPlace(h0, ring::NegacyclicMul(u_ntt, pk_r.p0.ToNtt()));
  h0.ConvertTo(Domain::kCoefficient);
  ring::AddInPlace(h0, e0.ToCoefficient());
  RingElement h1 = ring::NegacyclicMul(u_ntt, pk_r.p1.ToNtt()).ToCoefficient();
  ring::AddInPlace(h1, e1.ToCoefficient());
  return KeySwitchShare{std::move(h0), std::move(h1), party};
}

PksAccumulator::PksAccumulator(ring::RingParamsPtr params, std::span<const PartyId> parties)
    : registered_(parties.begin(), parties.end()), h0_(params), h1_(params) {}

void PksAccumulator::Add(const KeySwitchShare& share) {
  if (!registered_.contains(share.party)) {
    throw InvalidArgument("key-switch share from unregistered party " +
                          std::to_string(share.party));
  }
  if (!received_.insert(share.party).second) {
    throw InvalidArgument("duplicate key-switch share from party " + std::to_string(share.party));
  }
  ring::AddInPlace(h0_, share.h0.ToCoefficient());
  ring::AddInPlace(h1_, share.h1.ToCoefficient());
}

std::vector<PartyId> PksAccumulator::Missing() const {
  std::vector<PartyId> out;
  for (PartyId p : registered_) {
    if (!received_.contains(p)) out.push_back(p);
  }
  return out;
}

bfv::Ciphertext PksAccumulator::Finish(const bfv::Ciphertext& ct) const {
  if (auto missing = Missing(); !missing.empty()) {
    throw InvalidArgument("missing key-switch share from party " + std::to_string(missing.front()));
  }
  bfv::Ciphertext out{ct.c0.ToCoefficient(), h1_};
  ring::AddInPlace(out.c0, h0_);
  return out;
}

bfv::Ciphertext PksMerge(const bfv::Ciphertext& ct, std::span<const KeySwitchShare> shares,
                         std::span<const PartyId> parties) {
  PksAccumulator acc(ct.params(), parties);
  for (const KeySwitchShare& s : shares) acc.Add(s);
  return acc.Finish(ct);
}

ReEncKeyPair GenReEncKeyPair(const ring::RingParamsPtr& params, const RingElement& crs_a,
                             Prng& prng, const ring::SamplerConfig& config) {
  bfv::KeyPair kp = bfv::KeyGen(params, crs_a, prng, config);
  return ReEncKeyPair{std::move(kp.sk), std::move(kp.pk)};
}

bool VerifyReEnc(const ReEncKeyPair& kp, Prng& prng, const ring::SamplerConfig& config) {
  const auto& params = kp.pk_r.p0.params();
  bfv::Plaintext probe;
  probe.coeffs.resize(params->n());
  const int log_t = params->log_t();
  for (auto& c : probe.coeffs) {
    c = log_t == 64 ? prng.Next64() : prng.UniformBelow(1ULL << log_t);
  }
  bfv::Ciphertext ct = bfv::Encrypt(kp.pk_r, probe, prng, config);
  return bfv::Decrypt(kp.sk_r, ct) == probe;
}

void SerializeShare(const KeySwitchShare& share, ByteWriter& out) {
  out.PutU32(share.party);
  ring::Serialize(share.h0, out);
  ring::Serialize(share.h1, out);
}

KeySwitchShare DeserializeShare(const ring::RingParamsPtr& params, ByteReader& in) {
  KeySwitchShare s;
  s.party = in.GetU32();
  s.h0 = ring::Deserialize(params, in);
  s.h1 = ring::Deserialize(params, in);
  return s;
}

}  // namespace dhsa::mkbfv
