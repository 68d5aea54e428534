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


#ifndef DHSA_HARNESS_SESSION_H_
#define DHSA_HARNESS_SESSION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dhsa/harness/transcript.h"
#include "dhsa/protocol/config.h"
#include "json.hpp"

namespace dhsa::harness {

using protocol::SessionConfig;

class UpdateSource {
 public:
  virtual ~UpdateSource() = default;
  virtual std::vector<double> Update(PartyId client, std::uint32_t epoch) = 0;
  // Called once per epoch with the aggregate every client obtained.
  virtual void OnAggregate(std::uint32_t /*epoch*/, std::span<const double> /*m0*/) {}
};

// Uniform updates in [m_min, m_max), seeded per (client, epoch).
class RandomUpdates : public UpdateSource {
 public:
  explicit RandomUpdates(const SessionConfig& config) : config_(config) {}
  std::vector<double> Update(PartyId client, std::uint32_t epoch) override;

 private:
  SessionConfig config_;
};

struct SessionOptions {
  bool keep_payloads = false;
  Bus::Interceptor interceptor;
};

struct ErrorInfo {
  std::string kind;
  std::string phase;
  std::string message;
};

struct SessionReport {
  SessionConfig config;

  std::size_t rounds = 0;
  std::size_t expected_rounds = 0;
  std::size_t msa_runs = 0;
  std::size_t hma_epochs = 0;

  std::map<PartyId, Traffic> traffic;
  std::uint64_t total_bytes = 0;
  std::size_t messages = 0;
  // Size of one client's SeedCiphertexts message.
  std::uint64_t msa_round2_upload = 0;
  // Size of one client's MaskedUpload message.
  std::uint64_t hma_upload = 0;

  // e0 = x0 - sum x_u per entry, over all epochs.
  std::map<std::int64_t, std::uint64_t> error_histogram;
  std::uint64_t error_violations = 0;
  double max_abs_dequant_error = 0.0;
  std::uint64_t clipped = 0;
  std::uint64_t quantized_entries = 0;
  std::uint64_t seed_reuse = 0;

  // Mean client upload per epoch, MSA amortized over tau epochs.
  double amortized_upload_per_epoch = 0.0;
  double inflation_vs_16bit = 0.0;
  double inflation_vs_32bit = 0.0;
  double hma_inflation_vs_16bit = 0.0;

  std::string transcript_sha256;
  std::optional<ErrorInfo> error;

  double msa_ms = 0.0;
  double hma_ms = 0.0;
  double total_ms = 0.0;

  double clip_rate() const {
    return quantized_entries == 0 ? 0.0 : static_cast<double>(clipped) / quantized_entries;
  }
  // Timing lives under its own key so it can be dropped for comparisons.
  nlohmann::json ToJson(bool with_timing = true) const;
};

struct SessionResult {
  SessionReport report;
  Transcript transcript;
};

// Runs the full schedule. Protocol failures surface as SessionAbort whose
// phase names the MSA run or epoch.
SessionResult RunSession(const SessionConfig& config, UpdateSource& source,
                         const SessionOptions& options = {});

nlohmann::json ConfigToJson(const SessionConfig& config);
nlohmann::json ErrorToJson(const ErrorInfo& error);

}  // namespace dhsa::harness

#endif  // DHSA_HARNESS_SESSION_H_
