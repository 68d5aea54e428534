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


#ifndef DHSA_HARNESS_TRANSCRIPT_H_
#define DHSA_HARNESS_TRANSCRIPT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dhsa/common/digest.h"
#include "dhsa/protocol/messages.h"
#include "dhsa/protocol/parties.h"

namespace dhsa::harness {

using protocol::Envelope;
using protocol::Message;
using protocol::MessageType;
using protocol::Outgoing;
using protocol::PartyId;

struct TranscriptEntry {
  std::size_t round = 0;
  Envelope envelope;
  // Serialized length including the envelope.
  std::size_t size = 0;
  std::vector<PartyId> to;
  Digest32 digest{};
  // Serialized message; kept only when payload capture is on.
  Bytes bytes;
};

// What one client saw locally in one epoch.
struct LocalView {
  PartyId party = 0;
  protocol::EpochView view;
  std::vector<std::int64_t> x0;
};

class Transcript {
 public:
  explicit Transcript(bool keep_payloads = false) : keep_payloads_(keep_payloads) {}

  void Append(std::size_t round, const Message& m, Bytes serialized, std::vector<PartyId> to);
  void AddView(LocalView view);

  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  const std::vector<LocalView>& views() const { return views_; }
  bool keep_payloads() const { return keep_payloads_; }

  // Chained SHA-256 over rounds, receivers and serialized bytes.
  std::string DigestHex() const;
  std::size_t total_bytes() const;

  // Binary log: per entry u64 round, u32 receiver count, receivers, u64
  // length, serialized message. Requires payload capture.
  void WriteBinary(std::ostream& out) const;

 private:
  bool keep_payloads_;
  std::vector<TranscriptEntry> entries_;
  std::vector<LocalView> views_;
  Sha256 chain_;
};

struct Traffic {
  std::uint64_t msa_up = 0;
  std::uint64_t msa_down = 0;
  std::uint64_t hma_up = 0;
  std::uint64_t hma_down = 0;
  // Client-to-client key delivery outside the server's view.
  std::uint64_t secure_up = 0;
  std::uint64_t secure_down = 0;

  std::uint64_t up() const { return msa_up + hma_up + secure_up; }
  std::uint64_t down() const { return msa_down + hma_down + secure_down; }
};

// Serializes every message, records it, and hands receivers a parsed copy.
class Bus {
 public:
  // May rewrite a message before it is serialized; returning false drops it.
  using Interceptor = std::function<bool(Message&, const std::vector<PartyId>& to)>;

  explicit Bus(Transcript& transcript) : transcript_(transcript) {}

  void set_interceptor(Interceptor f) { interceptor_ = std::move(f); }
  void set_round(std::size_t round) { round_ = round; }
  std::size_t round() const { return round_; }

  // Records the message and returns it parsed back from the wire, or
  // nothing if the interceptor dropped it.
  std::optional<Outgoing> Send(Outgoing out);

  const std::map<PartyId, Traffic>& traffic() const { return traffic_; }

 private:
  Transcript& transcript_;
  Interceptor interceptor_;
  std::size_t round_ = 0;
  std::map<PartyId, Traffic> traffic_;
};

}  // namespace dhsa::harness

#endif  // DHSA_HARNESS_TRANSCRIPT_H_
