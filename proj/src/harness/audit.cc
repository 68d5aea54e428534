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


#include "dhsa/harness/audit.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "dhsa/codec/codec.h"
#include "dhsa/common/errors.h"
#include "dhsa/shprg/shprg.h"

namespace dhsa::harness {

namespace {

using protocol::kServerId;

constexpr int kBucketBits = 8;

bool ServerMayReceive(MessageType t) {
  return t == MessageType::kPkShare || t == MessageType::kSeedCiphertexts ||
         t == MessageType::kKeySwitchShares || t == MessageType::kMaskedUpload;
}

}  // namespace

Colluders ParseColluders(std::string_view list) {
  Colluders c;
  std::set<PartyId> seen;
  while (!list.empty()) {
    const std::size_t comma = list.find(',');
    std::string_view tok = list.substr(0, comma);
    list = comma == std::string_view::npos ? std::string_view() : list.substr(comma + 1);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (tok.empty()) continue;
    if (tok == "server") {
      c.server = true;
      continue;
    }
    PartyId id = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
    if (ec != std::errc() || end != tok.data() + tok.size()) {
      throw InvalidArgument("bad colluder '" + std::string(tok) + "' (expected server or a client id)");
    }
    if (seen.insert(id).second) c.clients.push_back(id);
  }
  std::sort(c.clients.begin(), c.clients.end());
  return c;
}

AuditReport AuditColludingView(const protocol::SessionConfig& config,
                               const Transcript& transcript, const Colluders& colluders) {
  if (!transcript.keep_payloads()) {
    throw InvalidArgument("audit needs a transcript recorded with payloads");
  }
  const std::uint32_t n = config.num_clients;
  for (PartyId c : colluders.clients) {
    if (c >= n) throw InvalidArgument("colluder " + std::to_string(c) + " is not a client");
  }
  if (colluders.clients.size() + 2 > n) {
    throw InvalidArgument("colluder set too large: " + std::to_string(colluders.clients.size()) +
                          " clients collude, at most N-2=" +
                          std::to_string(n < 2 ? 0 : n - 2) + " allowed");
  }

  AuditReport report;
  report.colluders = colluders;
  std::set<PartyId> colluding(colluders.clients.begin(), colluders.clients.end());
  for (PartyId c = 0; c < n; ++c) {
    if (!colluding.contains(c)) report.honest.push_back(c);
  }
  const std::set<PartyId> honest(report.honest.begin(), report.honest.end());

  const shprg::Shprg shprg(config.shprg_params());
  const codec::QuantParams qp = config.quant_params();
  const int log_p = shprg.params().log_p;
  const std::size_t m = config.model_size;
  const ring::RingParamsPtr ring = ring::RingParams::Default();
  const std::uint64_t p0 = ring->primes()[0];

  std::vector<std::uint64_t> masked_counts(1u << kBucketBits, 0);
  std::vector<std::uint64_t> ct_counts(1u << kBucketBits, 0);
  std::uint64_t masked_samples = 0;
  std::uint64_t ct_samples = 0;
  std::map<std::uint32_t, codec::MaskedVector> y0_by_epoch;

  // Index local views by (epoch, party).
  std::map<std::pair<std::uint32_t, PartyId>, const LocalView*> views;
  for (const LocalView& v : transcript.views()) views[{v.view.epoch, v.party}] = &v;

  for (const TranscriptEntry& e : transcript.entries()) {
    const Envelope& env = e.envelope;
    const std::string type = protocol::MessageTypeName(env.type);
    const bool to_server = std::find(e.to.begin(), e.to.end(), kServerId) != e.to.end();
    if (to_server && (!ServerMayReceive(env.type) || env.secure())) {
      report.structural_ok = false;
      report.findings.push_back("server received " + type + " from party " +
                                std::to_string(env.sender));
    }
    if (env.secure()) {
      const bool ok = env.type == MessageType::kReEncKeyDeliver && env.sender == config.leader &&
                      !to_server;
      if (!ok) {
        report.structural_ok = false;
        report.findings.push_back("unexpected secure-channel " + type);
      }
    }
    if (env.sender != kServerId && honest.contains(env.sender)) {
      const bool allowed = ServerMayReceive(env.type) ||
                           (env.type == MessageType::kReEncKeyDeliver && env.sender == config.leader);
      if (!allowed) {
        report.structural_ok = false;
        report.findings.push_back("honest client " + std::to_string(env.sender) + " sent " + type);
      }
    }

    const protocol::Message msg = protocol::DecodeMessage(e.bytes);
    if (env.type == MessageType::kMaskedUpload && honest.contains(env.sender)) {
      const codec::MaskedVector y = protocol::DecodeMasked(msg.payload, m, log_p);
      for (std::uint64_t v : y.values) ++masked_counts[v >> (log_p - kBucketBits)];
      masked_samples += y.values.size();
      // A masked upload must not reveal the plain quantized update.
      auto it = views.find({env.epoch, env.sender});
      if (it != views.end()) {
        std::size_t equal = 0;
        for (std::size_t j = 0; j < m; ++j) equal += y.values[j] == it->second->view.x.values[j];
        if (equal * 100 > m + 100) {
          report.structural_ok = false;
          report.findings.push_back("masked upload of client " + std::to_string(env.sender) +
                                    " matches its plain update in " + std::to_string(equal) +
                                    " entries");
        }
      }
    } else if (env.type == MessageType::kSeedCiphertexts && honest.contains(env.sender)) {
      for (const bfv::Ciphertext& ct : protocol::DecodeCiphertexts(ring, msg.payload)) {
        for (const ring::RingElement* el : {&ct.c0, &ct.c1}) {
          for (std::uint64_t r : el->residues(0)) {
            ++ct_counts[static_cast<std::size_t>((static_cast<unsigned __int128>(r) << kBucketBits) / p0)];
          }
          ct_samples += el->n();
        }
      }
    } else if (env.type == MessageType::kMaskedAggBroadcast) {
      y0_by_epoch[env.epoch] = protocol::DecodeMasked(msg.payload, m, log_p);
    }
  }

  report.uniformity.push_back({"honest masked uploads", masked_samples, ChiSquareUniform(masked_counts)});
  report.uniformity.push_back(
      {"honest seed ciphertexts", ct_samples, ChiSquareUniform(ct_counts)});

  if (!colluders.clients.empty()) {
    const PartyId insider = colluders.clients.front();
    for (const auto& [epoch, y0] : y0_by_epoch) {
      auto own = views.find({epoch, insider});
      if (own == views.end()) throw InvalidArgument("transcript lacks local views");
      // The colluders unmask with their own copy of k0.
      const shprg::MaskStream g0 = shprg.Expand(own->second->view.k0, m);
      std::vector<std::int64_t> rec = codec::Unmask(y0, g0, qp.p, qp.num_parties);
      for (PartyId c : colluders.clients) {
        const auto& x = views.at({epoch, c})->view.x.values;
        for (std::size_t j = 0; j < m; ++j) rec[j] -= static_cast<std::int64_t>(x[j]);
      }
      // Compare with the ideal leakage and with the honest inputs.
      const LocalView& ref = *views.at({epoch, report.honest.front()});
      for (std::size_t j = 0; j < m; ++j) {
        std::int64_t ideal = ref.x0[j];
        std::int64_t truth = 0;
        for (PartyId c : colluders.clients) {
          ideal -= static_cast<std::int64_t>(views.at({epoch, c})->view.x.values[j]);
        }
        for (PartyId h : report.honest) {
          truth += static_cast<std::int64_t>(views.at({epoch, h})->view.x.values[j]);
        }
        if (rec[j] != ideal) report.matches_ideal = false;
        report.max_deviation = std::max(report.max_deviation, std::abs(rec[j] - truth));
      }
      report.reconstructed.push_back(std::move(rec));
    }
  }
  return report;
}

bool AuditReport::Passes(double significance) const {
  if (!structural_ok || !matches_ideal) return false;
  for (const auto& u : uniformity) {
    if (!u.chi.Passes(significance)) return false;
  }
  return true;
}

nlohmann::json AuditReport::ToJson(double significance) const {
  nlohmann::json uni = nlohmann::json::array();
  for (const auto& u : uniformity) {
    uni.push_back({{"source", u.source},
                   {"samples", u.samples},
                   {"buckets", 1 << kBucketBits},
                   {"chi_square", u.chi.statistic},
                   {"p_value", u.chi.p_value},
                   {"passes", u.chi.Passes(significance)}});
  }
  nlohmann::json rec = nlohmann::json::array();
  for (const auto& r : reconstructed) {
    std::int64_t total = 0;
    for (std::int64_t v : r) total += v;
    rec.push_back({{"entries", r.size()}, {"sum", total},
                   {"head", std::vector<std::int64_t>(r.begin(), r.begin() + std::min<std::size_t>(8, r.size()))}});
  }
  return {{"colluders", {{"server", colluders.server}, {"clients", colluders.clients}}},
          {"honest", honest},
          {"reconstruction", {{"epochs", rec}, {"matches_ideal_leakage", matches_ideal},
                              {"max_deviation_from_honest_sum", max_deviation}}},
          {"structural", {{"ok", structural_ok}, {"findings", findings}}},
          {"uniformity", uni},
          {"significance", significance},
          {"passes", Passes(significance)}};
}

}  // namespace dhsa::harness
