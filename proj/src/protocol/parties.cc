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


#include "dhsa/protocol/parties.h"

#include <algorithm>
#include <string>

#include "dhsa/common/errors.h"

namespace dhsa::protocol {

namespace {

std::string Who(PartyId id) {
  return id == kServerId ? std::string("server") : "client " + std::to_string(id);
}

// Inbox order is arrival order; handle it by sender id instead.
std::vector<const Message*> BySender(std::span<const Message> inbox) {
  std::vector<const Message*> out;
  for (const Message& m : inbox) out.push_back(&m);
  std::stable_sort(out.begin(), out.end(), [](const Message* a, const Message* b) {
    return a->envelope.sender < b->envelope.sender;
  });
  return out;
}

}  // namespace

const char* PhaseName(ClientPhase phase) {
  switch (phase) {
    case ClientPhase::kIdle: return "Idle";
    case ClientPhase::kAwaitKeys: return "AwaitKeys";
    case ClientPhase::kAwaitAggregate: return "AwaitAggregate";
    case ClientPhase::kAwaitReEnc: return "AwaitReEnc";
    case ClientPhase::kReady: return "Ready";
    case ClientPhase::kAwaitMaskedAggregate: return "AwaitMaskedAggregate";
  }
  return "Unknown";
}

const char* PhaseName(ServerPhase phase) {
  switch (phase) {
    case ServerPhase::kIdle: return "Idle";
    case ServerPhase::kCollectPk: return "CollectPk";
    case ServerPhase::kCollectSeedCiphertexts: return "CollectSeedCiphertexts";
    case ServerPhase::kCollectShares: return "CollectShares";
    case ServerPhase::kCollectMasked: return "CollectMasked";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- client

ClientParty::ClientParty(PartyId id, std::shared_ptr<const SessionContext> ctx)
    : id_(id),
      ctx_(std::move(ctx)),
      prng_(DeriveSeed(ctx_->config.master(), "client/" + std::to_string(id))) {}

Outgoing ClientParty::ToServer(MessageType type, Bytes payload, std::uint32_t epoch) const {
  Outgoing o;
  o.message.envelope = Envelope{type, 0, id_, run_, epoch};
  o.message.payload = std::move(payload);
  o.to = {kServerId};
  return o;
}

void ClientParty::OutOfPhase(const Message& m) const {
  throw ProtocolError(Who(id_) + " in phase " + PhaseName(phase_) +
                      " received out-of-phase " + MessageTypeName(m.envelope.type) + " from " +
                      Who(m.envelope.sender));
}

std::vector<Outgoing> ClientParty::BeginMsaRun(std::uint32_t run) {
  if (phase_ != ClientPhase::kIdle && phase_ != ClientPhase::kReady) {
    throw ProtocolError(Who(id_) + " cannot start MSA run " + std::to_string(run) +
                        " in phase " + PhaseName(phase_));
  }
  if (phase_ == ClientPhase::kReady && run <= run_) {
    throw ProtocolError(Who(id_) + ": MSA run ids must increase");
  }
  run_ = run;
  crs_ = ctx_->RunCrs(run).ToNtt();
  bfv::KeyPair kp = bfv::KeyGen(ctx_->ring, crs_, prng_, ctx_->config.sampler);
  sk_ = std::move(kp.sk);
  cpk_.reset();
  reenc_.reset();
  k_u_.assign(ctx_->config.tau, std::nullopt);
  k0_.assign(ctx_->config.tau, std::nullopt);
  for (auto& k : k_u_) k = ctx_->shprg.SampleSeed(prng_);

  std::vector<Outgoing> out;
  out.push_back(ToServer(MessageType::kPkShare, EncodeRingElement(kp.pk.p0)));
  if (is_leader()) {
    reenc_ = mkbfv::GenReEncKeyPair(ctx_->ring, crs_, prng_, ctx_->config.sampler);
    const Bytes key = EncodeReEncKey(*reenc_);
    for (PartyId c = 0; c < ctx_->config.num_clients; ++c) {
      if (c == id_) continue;
      Outgoing o;
      o.message.envelope = Envelope{MessageType::kReEncKeyDeliver, kSecureChannel, id_, run_, 0};
      o.message.payload = key;
      o.to = {c};
      out.push_back(std::move(o));
    }
  }
  phase_ = ClientPhase::kAwaitKeys;
  return out;
}

std::vector<Outgoing> ClientParty::Step(std::span<const Message> inbox) {
  for (const Message* m : BySender(inbox)) {
    const bool msa = IsMsaMessage(m->envelope.type);
    if (msa && m->envelope.run != run_) {
      throw ProtocolError(Who(id_) + " received " + MessageTypeName(m->envelope.type) +
                          " for run " + std::to_string(m->envelope.run) + " during run " +
                          std::to_string(run_));
    }
    if (!msa && m->envelope.epoch != epoch_) {
      throw ProtocolError(Who(id_) + " received " + MessageTypeName(m->envelope.type) +
                          " for epoch " + std::to_string(m->envelope.epoch) +
                          " during epoch " + std::to_string(epoch_));
    }
  }
  switch (phase_) {
    case ClientPhase::kAwaitKeys:
      return OnKeys(inbox);
    case ClientPhase::kAwaitAggregate:
    case ClientPhase::kAwaitReEnc:
    case ClientPhase::kAwaitMaskedAggregate: {
      std::vector<Outgoing> out;
      for (const Message* m : BySender(inbox)) {
        if (phase_ == ClientPhase::kAwaitAggregate &&
            m->envelope.type == MessageType::kAggCiphertextBroadcast) {
          out = OnAggregate(*m);
        } else if (phase_ == ClientPhase::kAwaitReEnc &&
                   m->envelope.type == MessageType::kReEncCtBroadcast) {
          OnReEnc(*m);
        } else if (phase_ == ClientPhase::kAwaitMaskedAggregate &&
                   m->envelope.type == MessageType::kMaskedAggBroadcast) {
          OnMaskedAggregate(*m);
        } else {
          OutOfPhase(*m);
        }
      }
      return out;
    }
    case ClientPhase::kIdle:
    case ClientPhase::kReady:
      if (!inbox.empty()) OutOfPhase(inbox.front());
      return {};
  }
  return {};
}

std::vector<Outgoing> ClientParty::OnKeys(std::span<const Message> inbox) {
  for (const Message* m : BySender(inbox)) {
    const Envelope& env = m->envelope;
    if (env.type == MessageType::kCpkBroadcast && env.sender == kServerId && !cpk_) {
      cpk_ = bfv::PublicKey{DecodeRingElement(ctx_->ring, m->payload).ToNtt(), crs_};
    } else if (env.type == MessageType::kReEncKeyDeliver && env.secure() &&
               env.sender == ctx_->config.leader && !is_leader() && !reenc_) {
      reenc_ = DecodeReEncKey(ctx_->ring, crs_, m->payload);
    } else {
      OutOfPhase(*m);
    }
  }
  if (!cpk_ || !reenc_) return {};
  if (!mkbfv::VerifyReEnc(*reenc_, prng_, ctx_->config.sampler)) {
    throw SessionAbort("msa", Who(id_) + ": re-encryption key pair failed validation in run " +
                                  std::to_string(run_));
  }
  std::vector<shprg::Seed> seeds;
  seeds.reserve(k_u_.size());
  for (const auto& k : k_u_) seeds.push_back(*k);
  std::vector<bfv::Ciphertext> cts;
  for (const auto& coeffs : codec::PackSeeds(seeds, ctx_->ring->n())) {
    cts.push_back(bfv::Encrypt(*cpk_, bfv::Plaintext{coeffs}, prng_, ctx_->config.sampler));
  }
  phase_ = ClientPhase::kAwaitAggregate;
  return {ToServer(MessageType::kSeedCiphertexts, EncodeCiphertexts(cts))};
}

std::vector<Outgoing> ClientParty::OnAggregate(const Message& m) {
  std::vector<bfv::Ciphertext> agg = DecodeCiphertexts(ctx_->ring, m.payload);
  if (agg.size() != ctx_->arrays_per_run()) {
    throw ProtocolError(Who(id_) + ": expected " + std::to_string(ctx_->arrays_per_run()) +
                        " aggregate ciphertexts, got " + std::to_string(agg.size()));
  }
  std::vector<mkbfv::KeySwitchShare> shares;
  shares.reserve(agg.size());
  for (const auto& ct : agg) {
    shares.push_back(mkbfv::PksShare(*sk_, ct, reenc_->pk_r, id_, prng_, ctx_->config.sampler));
  }
  phase_ = ClientPhase::kAwaitReEnc;
  return {ToServer(MessageType::kKeySwitchShares, EncodeShares(shares))};
}

void ClientParty::OnReEnc(const Message& m) {
  std::vector<bfv::Ciphertext> cts = DecodeCiphertexts(ctx_->ring, m.payload);
  if (cts.size() != ctx_->arrays_per_run()) {
    throw ProtocolError(Who(id_) + ": expected " + std::to_string(ctx_->arrays_per_run()) +
                        " re-encrypted ciphertexts, got " + std::to_string(cts.size()));
  }
  std::vector<std::vector<std::uint64_t>> arrays;
  arrays.reserve(cts.size());
  for (const auto& ct : cts) arrays.push_back(bfv::Decrypt(reenc_->sk_r, ct).coeffs);
  std::vector<shprg::Seed> sums =
      codec::UnpackSeeds(arrays, static_cast<std::size_t>(ctx_->shprg.params().mu),
                         ctx_->config.tau);
  // Sums arrive mod t; q divides t, so reducing mod q gives the seed sum.
  for (std::size_t i = 0; i < sums.size(); ++i) k0_[i] = ctx_->shprg.Reduce(std::move(sums[i]));
  sk_.reset();
  phase_ = ClientPhase::kReady;
}

std::vector<Outgoing> ClientParty::BeginEpoch(std::uint32_t epoch,
                                              std::span<const double> update) {
  const std::size_t tau = ctx_->config.tau;
  if (phase_ != ClientPhase::kReady) {
    throw ProtocolError(Who(id_) + " cannot start epoch " + std::to_string(epoch) +
                        " in phase " + PhaseName(phase_));
  }
  const std::size_t slot = epoch - static_cast<std::size_t>(run_) * tau;
  if (epoch / tau != run_ || !k_u_[slot] || !k0_[slot]) {
    throw ProtocolError(Who(id_) + " holds no unused seed pair for epoch " +
                        std::to_string(epoch));
  }
  if (update.size() != ctx_->config.model_size) {
    throw InvalidArgument(Who(id_) + ": update length " + std::to_string(update.size()) +
                          " differs from model size " +
                          std::to_string(ctx_->config.model_size));
  }
  epoch_ = epoch;
  codec::QuantizeResult q = codec::Quantize(update, ctx_->quant);
  shprg::Seed seeds[2] = {std::move(*k_u_[slot]), std::move(*k0_[slot])};
  k_u_[slot].reset();
  k0_[slot].reset();
  std::vector<shprg::MaskStream> masks = ctx_->shprg.ExpandMany(seeds, update.size());
  codec::MaskedVector y = codec::Mask(q.x, masks[0], ctx_->quant.p);
  g0_ = std::move(masks[1]);
  view_ = EpochView{epoch, std::move(q.x), std::move(seeds[0]), std::move(seeds[1]), q.clipped};
  output_.reset();
  phase_ = ClientPhase::kAwaitMaskedAggregate;
  return {ToServer(MessageType::kMaskedUpload,
                   EncodeMasked(y, ctx_->shprg.params().log_p), epoch)};
}

void ClientParty::OnMaskedAggregate(const Message& m) {
  codec::MaskedVector y0 =
      DecodeMasked(m.payload, ctx_->config.model_size, ctx_->shprg.params().log_p);
  EpochOutput out;
  out.epoch = epoch_;
  out.x0 = codec::Unmask(y0, g0_, ctx_->quant.p, ctx_->quant.num_parties);
  out.m0 = codec::Dequantize(out.x0, ctx_->quant);
  g0_ = {};
  output_ = std::move(out);
  phase_ = ClientPhase::kReady;
}

std::optional<EpochView> ClientParty::TakeEpochView() {
  std::optional<EpochView> v = std::move(view_);
  view_.reset();
  return v;
}

// ---------------------------------------------------------------- server

ServerParty::ServerParty(std::shared_ptr<const SessionContext> ctx) : ctx_(std::move(ctx)) {
  for (PartyId c = 0; c < ctx_->config.num_clients; ++c) clients_.push_back(c);
}

void ServerParty::BeginMsaRun(std::uint32_t run) {
  if (phase_ != ServerPhase::kIdle) {
    throw ProtocolError(std::string("server cannot start MSA run in phase ") + PhaseName(phase_));
  }
  run_ = run;
  crs_ = ctx_->RunCrs(run).ToNtt();
  pk_shares_.clear();
  received_.clear();
  phase_ = ServerPhase::kCollectPk;
}

void ServerParty::BeginEpoch(std::uint32_t epoch) {
  if (phase_ != ServerPhase::kIdle) {
    throw ProtocolError(std::string("server cannot start epoch in phase ") + PhaseName(phase_));
  }
  epoch_ = epoch;
  received_.clear();
  masked_sum_.values.assign(ctx_->config.model_size, 0);
  phase_ = ServerPhase::kCollectMasked;
}

std::vector<PartyId> ServerParty::Missing() const {
  std::vector<PartyId> out;
  if (phase_ == ServerPhase::kIdle) return out;
  for (PartyId c : clients_) {
    if (!received_.contains(c)) out.push_back(c);
  }
  return out;
}

std::vector<Outgoing> ServerParty::Broadcast(MessageType type, Bytes payload,
                                             std::uint32_t epoch) {
  Outgoing o;
  o.message.envelope = Envelope{type, 0, kServerId, run_, epoch};
  o.message.payload = std::move(payload);
  o.to = clients_;
  return {std::move(o)};
}

void ServerParty::Accept(const Message& m) {
  const Envelope& env = m.envelope;
  static constexpr MessageType kExpected[] = {
      MessageType::kPkShare, MessageType::kPkShare, MessageType::kSeedCiphertexts,
      MessageType::kKeySwitchShares, MessageType::kMaskedUpload};
  if (phase_ == ServerPhase::kIdle || env.type != kExpected[static_cast<int>(phase_)] ||
      env.secure()) {
    throw ProtocolError(std::string("server in phase ") + PhaseName(phase_) +
                        " received out-of-phase " + MessageTypeName(env.type) + " from " +
                        Who(env.sender));
  }
  if (env.sender >= ctx_->config.num_clients) {
    throw ProtocolError("server received " + std::string(MessageTypeName(env.type)) +
                        " from unregistered party " + std::to_string(env.sender));
  }
  const bool msa = phase_ != ServerPhase::kCollectMasked;
  if ((msa && env.run != run_) || (!msa && env.epoch != epoch_)) {
    throw ProtocolError("server received stale " + std::string(MessageTypeName(env.type)) +
                        " from " + Who(env.sender));
  }
  if (!received_.insert(env.sender).second) {
    throw ProtocolError("server received duplicate " + std::string(MessageTypeName(env.type)) +
                        " from " + Who(env.sender));
  }
  switch (phase_) {
    case ServerPhase::kCollectPk:
      pk_shares_.push_back(bfv::PublicKey{DecodeRingElement(ctx_->ring, m.payload).ToNtt(), crs_});
      break;
    case ServerPhase::kCollectSeedCiphertexts: {
      std::vector<bfv::Ciphertext> cts = DecodeCiphertexts(ctx_->ring, m.payload);
      if (cts.size() != ctx_->arrays_per_run()) {
        throw ProtocolError(Who(env.sender) + " sent " + std::to_string(cts.size()) +
                            " seed ciphertexts, expected " +
                            std::to_string(ctx_->arrays_per_run()));
      }
      if (aggregate_.empty()) {
        aggregate_ = std::move(cts);
      } else {
        for (std::size_t j = 0; j < cts.size(); ++j) bfv::AddInPlace(aggregate_[j], cts[j]);
      }
      break;
    }
    case ServerPhase::kCollectShares: {
      std::vector<mkbfv::KeySwitchShare> shares = DecodeShares(ctx_->ring, m.payload);
      if (shares.size() != aggregate_.size()) {
        throw ProtocolError(Who(env.sender) + " sent " + std::to_string(shares.size()) +
                            " key-switch shares, expected " + std::to_string(aggregate_.size()));
      }
      for (std::size_t j = 0; j < shares.size(); ++j) {
        if (shares[j].party != env.sender) {
          throw ProtocolError(Who(env.sender) + " sent a share labelled for party " +
                              std::to_string(shares[j].party));
        }
        switches_[j].Add(shares[j]);
      }
      break;
    }
    case ServerPhase::kCollectMasked:
      codec::AddMasked(masked_sum_,
                       DecodeMasked(m.payload, ctx_->config.model_size,
                                    ctx_->shprg.params().log_p),
                       ctx_->quant.p);
      break;
    case ServerPhase::kIdle:
      break;
  }
}

std::vector<Outgoing> ServerParty::Step(std::span<const Message> inbox) {
  for (const Message* m : BySender(inbox)) Accept(*m);
  if (received_.size() < clients_.size()) return {};
  received_.clear();
  switch (phase_) {
    case ServerPhase::kCollectPk: {
      bfv::PublicKey cpk = mkbfv::CombinePublicKeys(pk_shares_);
      pk_shares_.clear();
      aggregate_.clear();
      phase_ = ServerPhase::kCollectSeedCiphertexts;
      return Broadcast(MessageType::kCpkBroadcast, EncodeRingElement(cpk.p0));
    }
    case ServerPhase::kCollectSeedCiphertexts:
      switches_.assign(aggregate_.size(), mkbfv::PksAccumulator(ctx_->ring, clients_));
      phase_ = ServerPhase::kCollectShares;
      return Broadcast(MessageType::kAggCiphertextBroadcast, EncodeCiphertexts(aggregate_));
    case ServerPhase::kCollectShares: {
      std::vector<bfv::Ciphertext> switched;
      switched.reserve(aggregate_.size());
      for (std::size_t j = 0; j < aggregate_.size(); ++j) {
        switched.push_back(switches_[j].Finish(aggregate_[j]));
      }
      aggregate_.clear();
      switches_.clear();
      phase_ = ServerPhase::kIdle;
      return Broadcast(MessageType::kReEncCtBroadcast, EncodeCiphertexts(switched));
    }
    case ServerPhase::kCollectMasked: {
      phase_ = ServerPhase::kIdle;
      Bytes payload = EncodeMasked(masked_sum_, ctx_->shprg.params().log_p);
      masked_sum_ = {};
      return Broadcast(MessageType::kMaskedAggBroadcast, std::move(payload), epoch_);
    }
    case ServerPhase::kIdle:
      break;
  }
  return {};
}

}  // namespace dhsa::protocol
