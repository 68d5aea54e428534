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


#include "dhsa/protocol/schedule.h"

#include "dhsa/common/errors.h"

namespace dhsa::protocol {

RunPlan Schedule(std::size_t epochs, std::size_t tau) {
  if (epochs == 0) throw InvalidArgument("schedule needs at least one epoch");
  if (tau == 0) throw InvalidArgument("tau must be positive");
  RunPlan plan;
  for (std::size_t e = 0; e < epochs; ++e) {
    if (e % tau == 0) {
      plan.steps.push_back({PlanStep::Kind::kMsaRun, static_cast<std::uint32_t>(plan.msa_runs)});
      ++plan.msa_runs;
    }
    plan.steps.push_back({PlanStep::Kind::kHmaEpoch, static_cast<std::uint32_t>(e)});
    ++plan.hma_epochs;
  }
  return plan;
}

}  // namespace dhsa::protocol
