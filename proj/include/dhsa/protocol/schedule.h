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


#ifndef DHSA_PROTOCOL_SCHEDULE_H_
#define DHSA_PROTOCOL_SCHEDULE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dhsa::protocol {

inline constexpr std::size_t kMsaRounds = 3;
inline constexpr std::size_t kHmaRounds = 1;

struct PlanStep {
  enum class Kind { kMsaRun, kHmaEpoch };
  Kind kind = Kind::kHmaEpoch;
  // Run id for kMsaRun, epoch id for kHmaEpoch (both zero-based).
  std::uint32_t index = 0;

  bool operator==(const PlanStep&) const = default;
};

struct RunPlan {
  std::vector<PlanStep> steps;
  std::size_t msa_runs = 0;
  std::size_t hma_epochs = 0;

  // T + 3 ceil(T / tau).
  std::size_t total_rounds() const { return hma_epochs * kHmaRounds + msa_runs * kMsaRounds; }
};

// One MSA run before epochs 0, tau, 2 tau, ... followed by its epochs.
// Throws InvalidArgument if epochs or tau is zero.
RunPlan Schedule(std::size_t epochs, std::size_t tau);

}  // namespace dhsa::protocol

#endif  // DHSA_PROTOCOL_SCHEDULE_H_
