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


#include "dhsa/harness/session.h"

#include <chrono>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "dhsa/common/errors.h"
#include "dhsa/protocol/parties.h"
#include "dhsa/protocol/schedule.h"

namespace dhsa::harness {

namespace {

using protocol::ClientParty;
using protocol::kServerId;
using protocol::ServerParty;
using protocol::SessionContext;
using Clock = std::chrono::steady_clock;

double MsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

class Driver {
 public:
  Driver(const SessionConfig& config, UpdateSource& source, const SessionOptions& options)
      : ctx_(SessionContext::Create(config)),
        source_(source),
        result_{SessionReport{}, Transcript(options.keep_payloads)},
        bus_(result_.transcript),
        server_(ctx_) {
    if (options.interceptor) bus_.set_interceptor(options.interceptor);
    for (PartyId c = 0; c < config.num_clients; ++c) {
      clients_.emplace_back(c, ctx_);
      all_clients_.push_back(c);
    }
    result_.report.config = config;
  }

  SessionResult Run() {
    const auto start = Clock::now();
    const protocol::RunPlan plan = protocol::Schedule(ctx_->config.epochs, ctx_->config.tau);
    SessionReport& r = result_.report;
    r.expected_rounds = plan.total_rounds();
    r.msa_runs = plan.msa_runs;
    r.hma_epochs = plan.hma_epochs;
    for (const protocol::PlanStep& step : plan.steps) {
      const auto t0 = Clock::now();
      if (step.kind == protocol::PlanStep::Kind::kMsaRun) {
        Guard("msa run " + std::to_string(step.index), [&] { RunMsa(step.index); });
        r.msa_ms += MsSince(t0);
      } else {
        Guard("hma epoch " + std::to_string(step.index), [&] { RunEpoch(step.index); });
        r.hma_ms += MsSince(t0);
      }
    }
    Finish();
    r.total_ms = MsSince(start);
    return std::move(result_);
  }

 private:
  template <typename F>
  void Guard(const std::string& phase, F&& body) {
    try {
      body();
    } catch (const SessionAbort& e) {
      throw SessionAbort(phase, e.what());
    } catch (const Error& e) {
      throw SessionAbort(phase, e.what());
    }
  }

  // Streams uploads to the server as they are produced.
  void Upload(std::vector<Outgoing> outs, std::vector<Outgoing>& down) {
    for (Outgoing& o : outs) {
      std::optional<Outgoing> sent = bus_.Send(std::move(o));
      if (!sent) continue;
      Outgoing& d = *sent;
      if (d.to.size() == 1 && d.to[0] == kServerId) {
        for (Outgoing& b : server_.Step(std::span(&d.message, 1))) down.push_back(std::move(b));
      } else {
        for (PartyId to : d.to) {
          if (to >= clients_.size()) {
            throw ProtocolError("message addressed to unknown party " + std::to_string(to));
          }
          direct_[to].push_back(d.message);
        }
      }
    }
  }

  void Downlink(std::vector<Outgoing> down) {
    if (down.empty()) {
      std::string names;
      for (PartyId p : server_.Missing()) names += (names.empty() ? "" : ", ") + std::to_string(p);
      throw SessionAbort("round " + std::to_string(round_),
                         "server is missing uploads from client(s) " + names);
    }
    for (Outgoing& o : down) {
      if (o.to != all_clients_) throw ProtocolError("server broadcast does not reach every client");
      if (std::optional<Outgoing> sent = bus_.Send(std::move(o))) {
        broadcasts_.push_back(std::move(sent->message));
      }
    }
    ++round_;
    ++result_.report.rounds;
  }

  std::vector<Message> InboxFor(PartyId c) {
    std::vector<Message> in = std::move(direct_[c]);
    direct_.erase(c);
    in.insert(in.end(), broadcasts_.begin(), broadcasts_.end());
    return in;
  }

  void RunMsa(std::uint32_t run) {
    server_.BeginMsaRun(run);
    for (std::size_t k = 0; k < protocol::kMsaRounds; ++k) {
      bus_.set_round(round_);
      std::vector<Outgoing> down;
      for (ClientParty& c : clients_) {
        Upload(k == 0 ? c.BeginMsaRun(run) : c.Step(InboxFor(c.id())), down);
      }
      broadcasts_.clear();
      Downlink(std::move(down));
    }
    for (ClientParty& c : clients_) {
      if (!c.Step(InboxFor(c.id())).empty()) {
        throw ProtocolError("client " + std::to_string(c.id()) + " sent after the last MSA round");
      }
    }
    broadcasts_.clear();
  }

  void RunEpoch(std::uint32_t epoch) {
    const std::size_t m = ctx_->config.model_size;
    bus_.set_round(round_);
    server_.BeginEpoch(epoch);
    std::vector<Outgoing> down;
    std::vector<double> exact(m, 0.0);
    for (ClientParty& c : clients_) {
      const std::vector<double> update = source_.Update(c.id(), epoch);
      for (std::size_t j = 0; j < m && j < update.size(); ++j) exact[j] += update[j];
      Upload(c.BeginEpoch(epoch, update), down);
    }
    Downlink(std::move(down));

    SessionReport& r = result_.report;
    std::vector<std::int64_t> sum(m, 0);
    const std::vector<std::int64_t>* x0 = nullptr;
    std::vector<double> m0;
    for (ClientParty& c : clients_) {
      if (!c.Step(InboxFor(c.id())).empty()) {
        throw ProtocolError("client " + std::to_string(c.id()) + " replied to the aggregate");
      }
      const protocol::EpochOutput& out = *c.output();
      if (x0 == nullptr) {
        x0 = &out.x0;
        m0 = out.m0;
      } else if (*x0 != out.x0) {
        throw ProtocolError("clients disagree on the aggregate of epoch " +
                            std::to_string(epoch));
      }
      protocol::EpochView view = *c.TakeEpochView();
      for (std::size_t j = 0; j < m; ++j) sum[j] += static_cast<std::int64_t>(view.x.values[j]);
      r.clipped += view.clipped;
      r.quantized_entries += m;
      ByteWriter w;
      shprg::SerializeSeed(ctx_->shprg.params(), view.k_u, w);
      if (!seeds_seen_.insert(Sha256::Of(w.Take())).second) ++r.seed_reuse;
      result_.transcript.AddView(LocalView{c.id(), std::move(view), out.x0});
    }
    broadcasts_.clear();

    const std::int64_t bound = static_cast<std::int64_t>(clients_.size()) - 1;
    for (std::size_t j = 0; j < m; ++j) {
      const std::int64_t e0 = (*x0)[j] - sum[j];
      ++r.error_histogram[e0];
      if (e0 < -bound || e0 > bound) ++r.error_violations;
      r.max_abs_dequant_error = std::max(r.max_abs_dequant_error, std::abs(m0[j] - exact[j]));
    }
    source_.OnAggregate(epoch, m0);
  }

  void Finish() {
    SessionReport& r = result_.report;
    const Transcript& t = result_.transcript;
    r.traffic = bus_.traffic();
    r.messages = t.entries().size();
    r.total_bytes = t.total_bytes();
    r.transcript_sha256 = t.DigestHex();
    for (const TranscriptEntry& e : t.entries()) {
      if (e.envelope.sender != 0) continue;
      if (e.envelope.type == MessageType::kSeedCiphertexts && r.msa_round2_upload == 0) {
        r.msa_round2_upload = e.size;
      }
      if (e.envelope.type == MessageType::kMaskedUpload && r.hma_upload == 0) r.hma_upload = e.size;
    }

    double hma_up = 0;
    double msa_up = 0;
    for (PartyId c : all_clients_) {
      const Traffic& tr = r.traffic[c];
      hma_up += static_cast<double>(tr.hma_up);
      msa_up += static_cast<double>(tr.msa_up);
    }
    const double n = static_cast<double>(all_clients_.size());
    const double per_epoch_hma = hma_up / n / static_cast<double>(r.hma_epochs);
    const double per_run_msa = msa_up / n / static_cast<double>(r.msa_runs);
    const double m = static_cast<double>(ctx_->config.model_size);
    r.amortized_upload_per_epoch = per_epoch_hma + per_run_msa / static_cast<double>(ctx_->config.tau);
    r.inflation_vs_16bit = r.amortized_upload_per_epoch / (2.0 * m);
    r.inflation_vs_32bit = r.amortized_upload_per_epoch / (4.0 * m);
    r.hma_inflation_vs_16bit = per_epoch_hma / (2.0 * m);
  }

  std::shared_ptr<const SessionContext> ctx_;
  UpdateSource& source_;
  SessionResult result_;
  Bus bus_;
  ServerParty server_;
  std::vector<ClientParty> clients_;
  std::vector<PartyId> all_clients_;
  std::map<PartyId, std::vector<Message>> direct_;
  std::vector<Message> broadcasts_;
  std::set<Digest32> seeds_seen_;
  std::size_t round_ = 0;
};

std::string PartyName(PartyId p) { return p == kServerId ? "server" : std::to_string(p); }

}  // namespace

std::vector<double> RandomUpdates::Update(PartyId client, std::uint32_t epoch) {
  Prng prng(DeriveSeed(config_.master(),
                       "updates/" + std::to_string(client) + "/" + std::to_string(epoch)));
  std::vector<double> u(config_.model_size);
  for (double& v : u) v = config_.m_min + (config_.m_max - config_.m_min) * prng.UniformUnit();
  return u;
}

SessionResult RunSession(const SessionConfig& config, UpdateSource& source,
                         const SessionOptions& options) {
  return Driver(config, source, options).Run();
}

nlohmann::json ConfigToJson(const SessionConfig& c) {
  const shprg::ShprgParams sp = c.shprg_params();
  return {{"num_clients", c.num_clients},
          {"model_size", c.model_size},
          {"w", c.w},
          {"m_min", c.m_min},
          {"m_max", c.m_max},
          {"setting", std::string(1, c.setting)},
          {"mu", sp.mu},
          {"log_p", sp.log_p},
          {"log_q", sp.log_q},
          {"tau", c.tau},
          {"epochs", c.epochs},
          {"master_seed", c.master_seed},
          {"leader", c.leader},
          {"gaussian_sigma", c.sampler.gaussian_sigma}};
}

nlohmann::json ErrorToJson(const ErrorInfo& e) {
  return {{"kind", e.kind}, {"phase", e.phase}, {"message", e.message}};
}

nlohmann::json SessionReport::ToJson(bool with_timing) const {
  nlohmann::json parties = nlohmann::json::array();
  for (const auto& [id, t] : traffic) {
    parties.push_back({{"party", PartyName(id)},
                       {"msa_up", t.msa_up},
                       {"msa_down", t.msa_down},
                       {"hma_up", t.hma_up},
                       {"hma_down", t.hma_down},
                       {"secure_up", t.secure_up},
                       {"secure_down", t.secure_down}});
  }
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [e, count] : error_histogram) hist[std::to_string(e)] = count;
  nlohmann::json j = {
      {"config", ConfigToJson(config)},
      {"rounds", {{"total", rounds}, {"expected", expected_rounds}, {"msa_runs", msa_runs},
                  {"hma_epochs", hma_epochs}}},
      {"traffic", {{"total_bytes", total_bytes}, {"messages", messages},
                   {"msa_round2_upload", msa_round2_upload}, {"hma_upload", hma_upload},
                   {"parties", parties}}},
      {"correctness", {{"error_histogram", hist}, {"bound", config.num_clients - 1},
                       {"violations", error_violations},
                       {"max_abs_dequant_error", max_abs_dequant_error},
                       {"seed_reuse", seed_reuse}}},
      {"clipping", {{"clipped", clipped}, {"entries", quantized_entries}, {"rate", clip_rate()}}},
      {"inflation", {{"amortized_upload_per_epoch", amortized_upload_per_epoch},
                     {"vs_16bit_quantized", inflation_vs_16bit},
                     {"vs_32bit_float", inflation_vs_32bit},
                     {"hma_only_vs_16bit_quantized", hma_inflation_vs_16bit}}},
      {"transcript", {{"sha256", transcript_sha256}}},
      {"error", error ? ErrorToJson(*error) : nlohmann::json(nullptr)},
  };
  if (with_timing) {
    j["timing"] = {{"msa_ms", msa_ms}, {"hma_ms", hma_ms}, {"total_ms", total_ms}};
  }
  return j;
}

}  // namespace dhsa::harness
