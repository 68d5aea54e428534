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


#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dhsa/common/errors.h"
#include "dhsa/protocol/config.h"
#include "dhsa/protocol/messages.h"
#include "dhsa/protocol/parties.h"
#include "dhsa/protocol/schedule.h"
#include "gtest/gtest.h"

namespace dhsa::protocol {
namespace {

using shprg::u128;

// Minimal in-test network: every message goes through the wire format.
class Net {
 public:
  explicit Net(const SessionConfig& config) : ctx_(SessionContext::Create(config)), server_(ctx_) {
    for (PartyId c = 0; c < config.num_clients; ++c) clients_.emplace_back(c, ctx_);
  }

  void Post(std::vector<Outgoing> outs) {
    for (Outgoing& o : outs) {
      for (PartyId to : o.to) {
        inbox_[to].push_back(DecodeMessage(EncodeMessage(o.message)));
      }
    }
  }

  std::vector<Message> Take(PartyId id) {
    std::vector<Message> in = std::move(inbox_[id]);
    inbox_[id].clear();
    return in;
  }

  void StepServer() { Post(server_.Step(Take(kServerId))); }
  void StepClients() {
    for (auto& c : clients_) Post(c.Step(Take(c.id())));
  }

  void RunMsa(std::uint32_t run) {
    server_.BeginMsaRun(run);
    for (auto& c : clients_) Post(c.BeginMsaRun(run));
    for (int round = 0; round < 3; ++round) {
      StepServer();
      StepClients();
    }
  }

  // Runs one epoch and returns the local views.
  std::vector<EpochView> RunEpoch(std::uint32_t epoch,
                                  const std::vector<std::vector<double>>& updates) {
    server_.BeginEpoch(epoch);
    for (auto& c : clients_) Post(c.BeginEpoch(epoch, updates[c.id()]));
    StepServer();
    StepClients();
    std::vector<EpochView> views;
    for (auto& c : clients_) views.push_back(*c.TakeEpochView());
    return views;
  }

  const SessionContext& ctx() const { return *ctx_; }
  std::vector<ClientParty>& clients() { return clients_; }
  ServerParty& server() { return server_; }

 private:
  std::shared_ptr<const SessionContext> ctx_;
  ServerParty server_;
  std::vector<ClientParty> clients_;
  std::map<PartyId, std::vector<Message>> inbox_;
};

SessionConfig Small(std::uint32_t n, std::size_t m, std::size_t tau) {
  SessionConfig c;
  c.num_clients = n;
  c.model_size = m;
  c.tau = tau;
  c.epochs = tau;
  c.master_seed = 7;
  return c;
}

std::vector<std::vector<double>> RandomUpdates(std::uint32_t n, std::size_t m, std::uint64_t s) {
  Prng prng(SeedFromInt(s));
  std::vector<std::vector<double>> u(n, std::vector<double>(m));
  for (auto& v : u) {
    for (double& x : v) x = -1.0 + 2.0 * static_cast<double>(prng.UniformBelow(1u << 30)) / (1u << 30);
  }
  return u;
}

TEST(Schedule, RoundCounts) {
  EXPECT_EQ(Schedule(250, 100).msa_runs, 3u);
  EXPECT_EQ(Schedule(250, 100).total_rounds(), 259u);
  EXPECT_EQ(Schedule(1, 100).msa_runs, 1u);
  EXPECT_EQ(Schedule(1, 100).total_rounds(), 4u);
  for (std::size_t tau : {1u, 3u, 100u}) {
    EXPECT_EQ(Schedule(tau, tau).msa_runs, 1u);
    EXPECT_EQ(Schedule(tau, tau).total_rounds(), tau + 3);
  }
  EXPECT_EQ(Schedule(7, 3).total_rounds(), 7u + 9u);
  EXPECT_THROW(Schedule(0, 3), InvalidArgument);
  EXPECT_THROW(Schedule(3, 0), InvalidArgument);
}

TEST(Schedule, InterleavesRunsBeforeBatches) {
  for (std::size_t t = 1; t <= 40; ++t) {
    for (std::size_t tau = 1; tau <= 12; ++tau) {
      const RunPlan plan = Schedule(t, tau);
      EXPECT_EQ(plan.total_rounds(), t + 3 * ((t + tau - 1) / tau));
      std::size_t next_epoch = 0;
      std::size_t next_run = 0;
      for (const PlanStep& s : plan.steps) {
        if (s.kind == PlanStep::Kind::kMsaRun) {
          EXPECT_EQ(s.index, next_run++);
          EXPECT_EQ(next_epoch % tau, 0u);
        } else {
          EXPECT_EQ(s.index, next_epoch++);
          EXPECT_EQ(s.index / tau + 1, next_run);
        }
      }
      EXPECT_EQ(next_epoch, t);
    }
  }
}

TEST(Messages, EnvelopeRoundTrip) {
  Message m;
  m.envelope = Envelope{MessageType::kSeedCiphertexts, kSecureChannel, 42, 3, 77};
  m.payload = {1, 2, 3, 4, 5};
  const Bytes b = EncodeMessage(m);
  ASSERT_EQ(b.size(), Envelope::kSize + 5);
  EXPECT_EQ(b.size(), m.size());
  const Message d = DecodeMessage(b);
  EXPECT_EQ(d.envelope, m.envelope);
  EXPECT_EQ(d.payload, m.payload);
  EXPECT_TRUE(d.envelope.secure());
  Bytes bad = b;
  bad[0] = 0xEE;
  EXPECT_THROW(DecodeMessage(bad), Error);
  EXPECT_THROW(DecodeMessage(std::span<const std::uint8_t>(b).first(10)), Error);
}

TEST(Messages, TypeNames) {
  EXPECT_STREQ(MessageTypeName(MessageType::kKeySwitchShares), "KeySwitchShareMsg");
  EXPECT_STREQ(MessageTypeName(MessageType::kMaskedAggBroadcast), "MaskedAggBroadcast");
  EXPECT_TRUE(IsMsaMessage(MessageType::kReEncCtBroadcast));
  EXPECT_FALSE(IsMsaMessage(MessageType::kMaskedUpload));
}

TEST(Config, Invariants) {
  SessionConfig c = Small(3, 8, 2);
  EXPECT_NO_THROW(c.Validate());
  c.num_clients = 1;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c.allow_single_client = true;
  EXPECT_NO_THROW(c.Validate());
  c.num_clients = 300;
  try {
    c.Validate();
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("max clients 256"), std::string::npos) << e.what();
  }
  c.num_clients = 3;
  c.setting = 'C';
  try {
    c.Validate();
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("q_SHPRG divides t"), std::string::npos) << e.what();
  }
  c.setting = 'B';
  c.num_clients = 65536;
  EXPECT_NO_THROW(c.Validate());
  c.num_clients = 65537;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = Small(3, 8, 2);
  c.log_p = 20;
  EXPECT_EQ(c.shprg_params().p(), 1u << 20);
  EXPECT_NO_THROW(c.Validate());
}

TEST(Msa, SeedSumMatchesIntegerOracle) {
  Net net(Small(3, 8, 2));
  net.RunMsa(0);
  const int log_q = net.ctx().shprg.params().log_q;
  const u128 mask = (u128{1} << log_q) - 1;
  const auto updates = RandomUpdates(3, 8, 1);
  for (std::uint32_t e = 0; e < 2; ++e) {
    const auto views = net.RunEpoch(e, updates);
    ASSERT_EQ(views[0].k0.entries.size(), 512u);
    for (std::size_t j = 0; j < 512; ++j) {
      u128 sum = 0;
      for (const auto& v : views) sum += v.k_u.entries[j];
      for (const auto& v : views) ASSERT_EQ(v.k0.entries[j], sum & mask) << "entry " << j;
    }
  }
}

TEST(Msa, SingleClientGetsItsOwnSeeds) {
  SessionConfig c = Small(1, 8, 3);
  c.allow_single_client = true;
  Net net(c);
  net.RunMsa(0);
  for (std::uint32_t e = 0; e < 3; ++e) {
    const auto views = net.RunEpoch(e, RandomUpdates(1, 8, e));
    EXPECT_EQ(views[0].k0.entries, views[0].k_u.entries);
  }
}

TEST(Msa, CiphertextCountPerClient) {
  Net net(Small(2, 8, 100));
  net.server().BeginMsaRun(0);
  for (auto& c : net.clients()) net.Post(c.BeginMsaRun(0));
  net.StepServer();
  for (auto& c : net.clients()) {
    const auto out = c.Step(net.Take(c.id()));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].message.envelope.type, MessageType::kSeedCiphertexts);
    EXPECT_EQ(DecodeCiphertexts(net.ctx().ring, out[0].message.payload).size(),
              (512u * 100u + 4095u) / 4096u);
    EXPECT_EQ(net.ctx().arrays_per_run(), 13u);
  }
}

TEST(Msa, KeyDeliveryUsesSecureChannelOnly) {
  Net net(Small(4, 8, 1));
  std::vector<Outgoing> outs = net.clients()[0].BeginMsaRun(0);
  std::size_t deliveries = 0;
  for (const Outgoing& o : outs) {
    if (o.message.envelope.type == MessageType::kReEncKeyDeliver) {
      ++deliveries;
      EXPECT_TRUE(o.message.envelope.secure());
      ASSERT_EQ(o.to.size(), 1u);
      EXPECT_NE(o.to[0], kServerId);
    } else {
      EXPECT_EQ(o.to, std::vector<PartyId>{kServerId});
    }
  }
  EXPECT_EQ(deliveries, 3u);
  EXPECT_EQ(net.clients()[1].BeginMsaRun(0).size(), 1u);
}

TEST(Msa, TamperedReEncKeyAborts) {
  Net net(Small(3, 8, 1));
  net.server().BeginMsaRun(0);
  for (auto& c : net.clients()) {
    std::vector<Outgoing> outs = c.BeginMsaRun(0);
    for (Outgoing& o : outs) {
      if (o.message.envelope.type == MessageType::kReEncKeyDeliver && o.to[0] == 2) {
        o.message.payload[o.message.payload.size() - 100] ^= 0x01;
      }
    }
    net.Post(std::move(outs));
  }
  net.StepServer();
  EXPECT_NO_THROW(net.clients()[0].Step(net.Take(0)));
  EXPECT_NO_THROW(net.clients()[1].Step(net.Take(1)));
  try {
    net.clients()[2].Step(net.Take(2));
    FAIL();
  } catch (const SessionAbort& e) {
    EXPECT_EQ(e.phase(), "msa");
  }
}

TEST(Msa, FreshKeysPerRun) {
  Net net(Small(2, 8, 1));
  net.server().BeginMsaRun(0);
  const auto a = net.clients()[0].BeginMsaRun(0);
  net.Post(a);
  net.Post(net.clients()[1].BeginMsaRun(0));
  for (int round = 0; round < 3; ++round) {
    net.StepServer();
    net.StepClients();
  }
  net.RunEpoch(0, RandomUpdates(2, 8, 3));
  net.server().BeginMsaRun(1);
  const auto b = net.clients()[0].BeginMsaRun(1);
  EXPECT_NE(a[0].message.payload, b[0].message.payload);
  EXPECT_EQ(b[0].message.envelope.run, 1u);
}

TEST(Hma, AggregateWithinErrorBound) {
  const std::uint32_t n = 3;
  const std::size_t m = 8;
  Net net(Small(n, m, 1));
  net.RunMsa(0);
  const auto updates = RandomUpdates(n, m, 9);
  net.RunEpoch(0, updates);
  const double bound = (2.0 * n - 1) * std::ldexp(1.0, -16) * 2.0;
  for (auto& c : net.clients()) {
    ASSERT_TRUE(c.output().has_value());
    EXPECT_EQ(c.phase(), ClientPhase::kReady);
    for (std::size_t j = 0; j < m; ++j) {
      double want = 0;
      for (const auto& u : updates) want += u[j];
      EXPECT_LE(std::abs(c.output()->m0[j] - want), bound) << j;
    }
  }
}

TEST(Hma, ConstantMinimumInput) {
  const std::uint32_t n = 3;
  Net net(Small(n, 8, 1));
  net.RunMsa(0);
  net.RunEpoch(0, std::vector<std::vector<double>>(n, std::vector<double>(8, -1.0)));
  const double bound = (2.0 * n - 1) * std::ldexp(1.0, -16) * 2.0;
  for (double v : net.clients()[1].output()->m0) EXPECT_LE(std::abs(v + 3.0), bound);
}

TEST(Hma, NoiseStaysInTheoremRange) {
  const std::uint32_t n = 3;
  const std::size_t m = 10000;
  Net net(Small(n, m, 1));
  net.RunMsa(0);
  const auto views = net.RunEpoch(0, RandomUpdates(n, m, 4));
  const auto& x0 = net.clients()[0].output()->x0;
  for (std::size_t j = 0; j < m; ++j) {
    std::int64_t sum = 0;
    for (const auto& v : views) sum += static_cast<std::int64_t>(v.x.values[j]);
    const std::int64_t e0 = x0[j] - sum;
    ASSERT_GE(e0, -static_cast<std::int64_t>(n - 1)) << j;
    ASSERT_LE(e0, static_cast<std::int64_t>(n - 1)) << j;
  }
}

TEST(Hma, SeedsAreSingleUse) {
  Net net(Small(2, 8, 2));
  net.RunMsa(0);
  const auto u = RandomUpdates(2, 8, 5);
  net.RunEpoch(0, u);
  EXPECT_THROW(net.clients()[0].BeginEpoch(0, u[0]), ProtocolError);
  net.RunEpoch(1, u);
  EXPECT_THROW(net.clients()[0].BeginEpoch(2, u[0]), ProtocolError);
}

TEST(Hma, NoUploadBeforeSeedAgreement) {
  Net net(Small(2, 8, 2));
  EXPECT_THROW(net.clients()[0].BeginEpoch(0, std::vector<double>(8)), ProtocolError);
}

TEST(Step, ServerBroadcastsAfterAllUploads) {
  Net net(Small(4, 8, 1));
  net.RunMsa(0);
  net.server().BeginEpoch(0);
  const auto u = RandomUpdates(4, 8, 6);
  for (auto& c : net.clients()) net.Post(c.BeginEpoch(0, u[c.id()]));
  std::vector<Message> in = net.Take(kServerId);
  ASSERT_EQ(in.size(), 4u);
  std::reverse(in.begin(), in.end());
  EXPECT_TRUE(net.server().Step(std::span(in).first(3)).empty());
  EXPECT_EQ(net.server().Missing(), std::vector<PartyId>{0});
  const auto out = net.server().Step(std::span(in).last(1));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].message.envelope.type, MessageType::kMaskedAggBroadcast);
  EXPECT_EQ(out[0].to.size(), 4u);
  EXPECT_TRUE(net.server().Missing().empty());
}

TEST(Step, ClientTerminalStepEmitsNothing) {
  Net net(Small(2, 8, 1));
  net.RunMsa(0);
  net.server().BeginEpoch(0);
  const auto u = RandomUpdates(2, 8, 8);
  for (auto& c : net.clients()) net.Post(c.BeginEpoch(0, u[c.id()]));
  net.StepServer();
  for (auto& c : net.clients()) {
    EXPECT_EQ(c.phase(), ClientPhase::kAwaitMaskedAggregate);
    EXPECT_TRUE(c.Step(net.Take(c.id())).empty());
    EXPECT_EQ(c.phase(), ClientPhase::kReady);
    EXPECT_EQ(c.output()->epoch, 0u);
  }
}

TEST(Step, OutOfPhaseMessagesNameTheType) {
  Net net(Small(2, 8, 1));
  net.server().BeginMsaRun(0);
  for (auto& c : net.clients()) net.Post(c.BeginMsaRun(0));
  Message stray;
  stray.envelope = Envelope{MessageType::kMaskedAggBroadcast, 0, kServerId, 0, 0};
  try {
    net.clients()[1].Step(std::vector<Message>{stray});
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("MaskedAggBroadcast"), std::string::npos) << e.what();
  }
  Message early;
  early.envelope = Envelope{MessageType::kSeedCiphertexts, 0, 0, 0, 0};
  try {
    net.server().Step(std::vector<Message>{early});
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("SeedCiphertexts"), std::string::npos) << e.what();
  }
}

TEST(Step, ServerRejectsDuplicatesAndSecureMessages) {
  Net net(Small(2, 8, 1));
  net.server().BeginMsaRun(0);
  auto outs = net.clients()[1].BeginMsaRun(0);
  std::vector<Message> twice = {outs[0].message, outs[0].message};
  EXPECT_THROW(net.server().Step(twice), ProtocolError);

  ServerParty fresh(SessionContext::Create(Small(2, 8, 1)));
  fresh.BeginMsaRun(0);
  Message secure = outs[0].message;
  secure.envelope.flags = kSecureChannel;
  EXPECT_THROW(fresh.Step(std::vector<Message>{secure}), ProtocolError);
}

TEST(Step, ArrivalOrderDoesNotMatter) {
  auto transcript = [](bool reverse) {
    Net net(Small(3, 16, 1));
    std::vector<Bytes> log;
    net.server().BeginMsaRun(0);
    for (auto& c : net.clients()) net.Post(c.BeginMsaRun(0));
    for (int round = 0; round < 3; ++round) {
      std::vector<Message> in = net.Take(kServerId);
      if (reverse) std::reverse(in.begin(), in.end());
      auto out = net.server().Step(in);
      for (const auto& o : out) log.push_back(EncodeMessage(o.message));
      net.Post(std::move(out));
      net.StepClients();
    }
    return log;
  };
  EXPECT_EQ(transcript(false), transcript(true));
}

}  // namespace
}  // namespace dhsa::protocol
