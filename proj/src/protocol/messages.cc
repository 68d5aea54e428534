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


#include "dhsa/protocol/messages.h"

#include "dhsa/common/errors.h"

namespace dhsa::protocol {

namespace {

void ExpectDone(const ByteReader& r, const char* what) {
  if (!r.done()) throw ProtocolError(std::string("trailing bytes in ") + what + " payload");
}

}  // namespace

const char* MessageTypeName(MessageType type) {
  switch (type) {
    case MessageType::kPkShare: return "PkShare";
    case MessageType::kCpkBroadcast: return "CpkBroadcast";
    case MessageType::kReEncKeyDeliver: return "ReEncKeyDeliver";
    case MessageType::kSeedCiphertexts: return "SeedCiphertexts";
    case MessageType::kAggCiphertextBroadcast: return "AggCiphertextBroadcast";
    case MessageType::kKeySwitchShares: return "KeySwitchShareMsg";
    case MessageType::kReEncCtBroadcast: return "ReEncCtBroadcast";
    case MessageType::kMaskedUpload: return "MaskedUpload";
    case MessageType::kMaskedAggBroadcast: return "MaskedAggBroadcast";
  }
  return "Unknown";
}

bool IsMsaMessage(MessageType type) {
  return type != MessageType::kMaskedUpload && type != MessageType::kMaskedAggBroadcast;
}

Bytes EncodeMessage(const Message& m) {
  ByteWriter w;
  w.PutU16(static_cast<std::uint16_t>(m.envelope.type));
  w.PutU16(m.envelope.flags);
  w.PutU32(m.envelope.sender);
  w.PutU32(m.envelope.run);
  w.PutU32(m.envelope.epoch);
  w.PutBytes(m.payload);
  return w.Take();
}

Message DecodeMessage(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Message m;
  const std::uint16_t type = r.GetU16();
  if (type < 1 || type > 9) throw ProtocolError("unknown message type " + std::to_string(type));
  m.envelope.type = static_cast<MessageType>(type);
  m.envelope.flags = r.GetU16();
  m.envelope.sender = r.GetU32();
  m.envelope.run = r.GetU32();
  m.envelope.epoch = r.GetU32();
  auto rest = r.GetBytes(r.remaining());
  m.payload.assign(rest.begin(), rest.end());
  return m;
}

Bytes EncodeRingElement(const ring::RingElement& e) {
  ByteWriter w;
  ring::Serialize(e, w);
  return w.Take();
}

ring::RingElement DecodeRingElement(const ring::RingParamsPtr& params,
                                    std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  ring::RingElement e = ring::Deserialize(params, r);
  ExpectDone(r, "ring element");
  return e;
}

Bytes EncodeReEncKey(const mkbfv::ReEncKeyPair& kp) {
  ByteWriter w;
  bfv::SerializeSecretKey(kp.sk_r, w);
  ring::Serialize(kp.pk_r.p0, w);
  return w.Take();
}

mkbfv::ReEncKeyPair DecodeReEncKey(const ring::RingParamsPtr& params,
                                   const ring::RingElement& crs,
                                   std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  bfv::SecretKey sk = bfv::DeserializeSecretKey(params, r);
  ring::RingElement p0 = ring::Deserialize(params, r).ToNtt();
  ExpectDone(r, "re-encryption key");
  return mkbfv::ReEncKeyPair{std::move(sk), bfv::PublicKey{std::move(p0), crs.ToNtt()}};
}

Bytes EncodeCiphertexts(std::span<const bfv::Ciphertext> cts) {
  ByteWriter w;
  if (!cts.empty()) w.Reserve(4 + cts.size() * bfv::CiphertextSize(*cts[0].params()));
  w.PutU32(static_cast<std::uint32_t>(cts.size()));
  for (const auto& ct : cts) bfv::SerializeCiphertext(ct, w);
  return w.Take();
}

std::vector<bfv::Ciphertext> DecodeCiphertexts(const ring::RingParamsPtr& params,
                                               std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const std::uint32_t count = r.GetU32();
  if (count > r.remaining() / bfv::CiphertextSize(*params)) {
    throw ProtocolError("ciphertext count exceeds payload");
  }
  std::vector<bfv::Ciphertext> cts;
  cts.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) cts.push_back(bfv::DeserializeCiphertext(params, r));
  ExpectDone(r, "ciphertext");
  return cts;
}

Bytes EncodeShares(std::span<const mkbfv::KeySwitchShare> shares) {
  ByteWriter w;
  if (!shares.empty()) w.Reserve(4 + shares.size() * 2 * ring::SerializedSize(*shares[0].h0.params()) + 8);
  w.PutU32(static_cast<std::uint32_t>(shares.size()));
  for (const auto& s : shares) mkbfv::SerializeShare(s, w);
  return w.Take();
}

std::vector<mkbfv::KeySwitchShare> DecodeShares(const ring::RingParamsPtr& params,
                                                std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const std::uint32_t count = r.GetU32();
  if (count > r.remaining() / (2 * ring::SerializedSize(*params))) {
    throw ProtocolError("share count exceeds payload");
  }
  std::vector<mkbfv::KeySwitchShare> shares;
  shares.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) shares.push_back(mkbfv::DeserializeShare(params, r));
  ExpectDone(r, "key-switch share");
  return shares;
}

Bytes EncodeMasked(const codec::MaskedVector& y, int log_p) {
  ByteWriter w;
  codec::SerializeMasked(y, log_p, w);
  return w.Take();
}

codec::MaskedVector DecodeMasked(std::span<const std::uint8_t> payload, std::size_t count,
                                 int log_p) {
  ByteReader r(payload);
  codec::MaskedVector y = codec::DeserializeMasked(r, count, log_p);
  ExpectDone(r, "masked vector");
  return y;
}

}  // namespace dhsa::protocol
