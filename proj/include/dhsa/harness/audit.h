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


#ifndef DHSA_HARNESS_AUDIT_H_
#define DHSA_HARNESS_AUDIT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dhsa/common/stats.h"
#include "dhsa/harness/transcript.h"
#include "dhsa/protocol/config.h"
#include "json.hpp"

namespace dhsa::harness {

struct Colluders {
  bool server = false;
  std::vector<PartyId> clients;

  bool empty() const { return !server && clients.empty(); }
};

// Parses "server,3,5". Throws InvalidArgument on unknown tokens.
Colluders ParseColluders(std::string_view list);

struct UniformityCheck {
  std::string source;
  std::uint64_t samples = 0;
  ChiSquareResult chi;
};

struct AuditReport {
  Colluders colluders;
  std::vector<PartyId> honest;

  // Per epoch: the aggregate the colluders unmask themselves, minus their
  // own quantized inputs. Empty unless a client colludes.
  std::vector<std::vector<std::int64_t>> reconstructed;
  // Reconstruction equals what the honest clients' aggregate output leaks.
  bool matches_ideal = true;
  // max |reconstructed - sum of honest x_u| over all entries.
  std::int64_t max_deviation = 0;

  bool structural_ok = true;
  std::vector<std::string> findings;

  std::vector<UniformityCheck> uniformity;

  bool Passes(double significance) const;
  nlohmann::json ToJson(double significance) const;
};

// Needs a transcript recorded with payload capture. Throws InvalidArgument
// when more than N - 2 clients collude.
AuditReport AuditColludingView(const protocol::SessionConfig& config,
                               const Transcript& transcript, const Colluders& colluders);

}  // namespace dhsa::harness

#endif  // DHSA_HARNESS_AUDIT_H_
