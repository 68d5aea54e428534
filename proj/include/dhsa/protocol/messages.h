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


#ifndef DHSA_PROTOCOL_MESSAGES_H_
#define DHSA_PROTOCOL_MESSAGES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dhsa/bfv/bfv.h"
#include "dhsa/codec/codec.h"
#include "dhsa/common/bytes.h"
#include "dhsa/mkbfv/mkbfv.h"

namespace dhsa::protocol {

using mkbfv::PartyId;

inline constexpr PartyId kServerId = 0xFFFFFFFFu;

enum class MessageType : std::uint16_t {
  kPkShare = 1,
  kCpkBroadcast = 2,
  kReEncKeyDeliver = 3,
  kSeedCiphertexts = 4,
  kAggCiphertextBroadcast = 5,
  kKeySwitchShares = 6,
  kReEncCtBroadcast = 7,
  kMaskedUpload = 8,
  kMaskedAggBroadcast = 9,
};

const char* MessageTypeName(MessageType type);
bool IsMsaMessage(MessageType type);

// Envelope flag: delivered over the client-to-client secure channel.
inline constexpr std::uint16_t kSecureChannel = 0x1;

// Fixed 16-byte header: type u16, flags u16, sender u32, run u32, epoch u32.
struct Envelope {
  MessageType type = MessageType::kPkShare;
  std::uint16_t flags = 0;
  PartyId sender = 0;
  std::uint32_t run = 0;
  std::uint32_t epoch = 0;

  static constexpr std::size_t kSize = 16;
  bool secure() const { return (flags & kSecureChannel) != 0; }
  bool operator==(const Envelope&) const = default;
};

struct Message {
  Envelope envelope;
  Bytes payload;

  std::size_t size() const { return Envelope::kSize + payload.size(); }
};

// A message plus its receivers; routing data is not part of the wire bytes.
struct Outgoing {
  Message message;
  std::vector<PartyId> to;
};

Bytes EncodeMessage(const Message& m);
// Throws ProtocolError on a short buffer or unknown type.
Message DecodeMessage(std::span<const std::uint8_t> bytes);

// Typed payloads. Public-key messages carry only p0; p1 is the run CRS.
Bytes EncodeRingElement(const ring::RingElement& e);
ring::RingElement DecodeRingElement(const ring::RingParamsPtr& params,
                                    std::span<const std::uint8_t> payload);

Bytes EncodeReEncKey(const mkbfv::ReEncKeyPair& kp);
mkbfv::ReEncKeyPair DecodeReEncKey(const ring::RingParamsPtr& params,
                                   const ring::RingElement& crs,
                                   std::span<const std::uint8_t> payload);

// u32 count followed by ciphertexts.
Bytes EncodeCiphertexts(std::span<const bfv::Ciphertext> cts);
std::vector<bfv::Ciphertext> DecodeCiphertexts(const ring::RingParamsPtr& params,
                                               std::span<const std::uint8_t> payload);

// u32 count followed by shares.
Bytes EncodeShares(std::span<const mkbfv::KeySwitchShare> shares);
std::vector<mkbfv::KeySwitchShare> DecodeShares(const ring::RingParamsPtr& params,
                                                std::span<const std::uint8_t> payload);

Bytes EncodeMasked(const codec::MaskedVector& y, int log_p);
codec::MaskedVector DecodeMasked(std::span<const std::uint8_t> payload, std::size_t count,
                                 int log_p);

}  // namespace dhsa::protocol

#endif  // DHSA_PROTOCOL_MESSAGES_H_
