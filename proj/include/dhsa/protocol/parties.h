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


#ifndef DHSA_PROTOCOL_PARTIES_H_
#define DHSA_PROTOCOL_PARTIES_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "dhsa/bfv/bfv.h"
#include "dhsa/codec/codec.h"
#include "dhsa/mkbfv/mkbfv.h"
#include "dhsa/protocol/config.h"
#include "dhsa/protocol/messages.h"
#include "dhsa/shprg/shprg.h"

namespace dhsa::protocol {

enum class ClientPhase {
  kIdle,
  kAwaitKeys,
  kAwaitAggregate,
  kAwaitReEnc,
  kReady,
  kAwaitMaskedAggregate,
};

enum class ServerPhase {
  kIdle,
  kCollectPk,
  kCollectSeedCiphertexts,
  kCollectShares,
  kCollectMasked,
};

const char* PhaseName(ClientPhase phase);
const char* PhaseName(ServerPhase phase);

// Result of one HMA epoch at a client.
struct EpochOutput {
  std::uint32_t epoch = 0;
  // Sum of quantized updates plus SHPRG noise, before dequantization.
  std::vector<std::int64_t> x0;
  std::vector<double> m0;
};

// Secrets a client used in one epoch, handed to the harness for auditing.
struct EpochView {
  std::uint32_t epoch = 0;
  codec::QuantizedVector x;
  shprg::Seed k_u;
  shprg::Seed k0;
  std::size_t clipped = 0;
};

class ClientParty {
 public:
  ClientParty(PartyId id, std::shared_ptr<const SessionContext> ctx);

  // Round 1 of MSA: fresh keys and tau fresh seeds; emits PkShare, and the
  // leader also emits one ReEncKeyDeliver per other client.
  std::vector<Outgoing> BeginMsaRun(std::uint32_t run);

  // Quantizes and masks the update for `epoch`; requires both seeds of the
  // epoch. Consumed seeds are erased.
  std::vector<Outgoing> BeginEpoch(std::uint32_t epoch, std::span<const double> update);

  // Handles the messages of the current round. Throws ProtocolError on an
  // out-of-phase message and SessionAbort if the re-encryption key fails
  // validation.
  std::vector<Outgoing> Step(std::span<const Message> inbox);

  PartyId id() const { return id_; }
  bool is_leader() const { return id_ == ctx_->config.leader; }
  ClientPhase phase() const { return phase_; }
  const std::optional<EpochOutput>& output() const { return output_; }
  std::optional<EpochView> TakeEpochView();

 private:
  std::vector<Outgoing> OnKeys(std::span<const Message> inbox);
  std::vector<Outgoing> OnAggregate(const Message& m);
  void OnReEnc(const Message& m);
  void OnMaskedAggregate(const Message& m);
  [[noreturn]] void OutOfPhase(const Message& m) const;
  Outgoing ToServer(MessageType type, Bytes payload, std::uint32_t epoch = 0) const;

  PartyId id_;
  std::shared_ptr<const SessionContext> ctx_;
  Prng prng_;
  ClientPhase phase_ = ClientPhase::kIdle;
  std::uint32_t run_ = 0;
  std::uint32_t epoch_ = 0;

  ring::RingElement crs_;
  std::optional<bfv::SecretKey> sk_;
  std::optional<bfv::PublicKey> cpk_;
  std::optional<mkbfv::ReEncKeyPair> reenc_;
  std::vector<std::optional<shprg::Seed>> k_u_;
  std::vector<std::optional<shprg::Seed>> k0_;

  shprg::MaskStream g0_;
  std::optional<EpochView> view_;
  std::optional<EpochOutput> output_;
};

// Holds only public keys, ciphertexts and masked vectors.
class ServerParty {
 public:
  explicit ServerParty(std::shared_ptr<const SessionContext> ctx);

  void BeginMsaRun(std::uint32_t run);
  void BeginEpoch(std::uint32_t epoch);

  // Accumulates uploads; emits the broadcast once every client has sent.
  std::vector<Outgoing> Step(std::span<const Message> inbox);

  ServerPhase phase() const { return phase_; }
  // Clients whose upload for the current phase has not arrived.
  std::vector<PartyId> Missing() const;

 private:
  void Accept(const Message& m);
  std::vector<Outgoing> Broadcast(MessageType type, Bytes payload, std::uint32_t epoch = 0);

  std::shared_ptr<const SessionContext> ctx_;
  std::vector<PartyId> clients_;
  ServerPhase phase_ = ServerPhase::kIdle;
  std::uint32_t run_ = 0;
  std::uint32_t epoch_ = 0;
  std::set<PartyId> received_;

  ring::RingElement crs_;
  std::vector<bfv::PublicKey> pk_shares_;
  std::vector<bfv::Ciphertext> aggregate_;
  std::vector<mkbfv::PksAccumulator> switches_;
  codec::MaskedVector masked_sum_;
};

}  // namespace dhsa::protocol

#endif  // DHSA_PROTOCOL_PARTIES_H_
