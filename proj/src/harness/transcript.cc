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


#include "dhsa/harness/transcript.h"

#include <ostream>

#include "dhsa/common/errors.h"

namespace dhsa::harness {

void Transcript::Append(std::size_t round, const Message& m, Bytes serialized,
                        std::vector<PartyId> to) {
  TranscriptEntry e;
  e.round = round;
  e.envelope = m.envelope;
  e.size = serialized.size();
  e.digest = Sha256::Of(serialized);
  chain_.UpdateU64(round);
  chain_.UpdateU64(to.size());
  for (PartyId p : to) chain_.UpdateU64(p);
  chain_.UpdateU64(serialized.size());
  chain_.Update(serialized);
  e.to = std::move(to);
  if (keep_payloads_) e.bytes = std::move(serialized);
  entries_.push_back(std::move(e));
}

void Transcript::AddView(LocalView view) {
  if (keep_payloads_) views_.push_back(std::move(view));
}

std::string Transcript::DigestHex() const { return ToHex(chain_.Peek()); }

std::size_t Transcript::total_bytes() const {
  std::size_t total = 0;
  for (const auto& e : entries_) total += e.size * e.to.size();
  return total;
}

void Transcript::WriteBinary(std::ostream& out) const {
  if (!keep_payloads_) throw InvalidArgument("transcript was recorded without payloads");
  ByteWriter w;
  for (const auto& e : entries_) {
    w.PutU64(e.round);
    w.PutU32(static_cast<std::uint32_t>(e.to.size()));
    for (PartyId p : e.to) w.PutU32(p);
    w.PutU64(e.bytes.size());
    w.PutBytes(e.bytes);
  }
  const Bytes b = w.Take();
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

std::optional<Outgoing> Bus::Send(Outgoing out) {
  if (interceptor_ && !interceptor_(out.message, out.to)) return std::nullopt;
  Bytes wire = protocol::EncodeMessage(out.message);
  const std::uint64_t size = wire.size();
  const Envelope env = out.message.envelope;
  const bool msa = protocol::IsMsaMessage(env.type);

  Traffic& sender = traffic_[env.sender];
  for (PartyId to : out.to) {
    Traffic& receiver = traffic_[to];
    if (env.secure()) {
      sender.secure_up += size;
      receiver.secure_down += size;
    } else if (msa) {
      sender.msa_up += size;
      receiver.msa_down += size;
    } else {
      sender.hma_up += size;
      receiver.hma_down += size;
    }
  }

  Outgoing delivered{protocol::DecodeMessage(wire), out.to};
  transcript_.Append(round_, out.message, std::move(wire), std::move(out.to));
  return delivered;
}

}  // namespace dhsa::harness
