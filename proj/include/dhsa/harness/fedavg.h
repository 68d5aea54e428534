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


#ifndef DHSA_HARNESS_FEDAVG_H_
#define DHSA_HARNESS_FEDAVG_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dhsa/protocol/config.h"

namespace dhsa::harness {

struct TrainerConfig {
  std::size_t features = 10;
  std::size_t samples_per_client = 200;
  std::size_t test_samples = 2000;
  // Class means sit at +-separation along a random unit direction.
  double separation = 2.0;
  // Points closer than this to the true boundary are resampled.
  double margin = 0.25;
  std::size_t local_steps = 5;
  double learning_rate = 0.1;
  std::size_t epochs = 20;
  std::uint64_t seed = 11;
};

enum class AggregationMode { kPlain, kDhsa };

struct TrainingCurve {
  // Held-out accuracy after each epoch.
  std::vector<double> accuracy;
  std::vector<double> weights;
  std::uint64_t clipped = 0;

  double final_accuracy() const { return accuracy.empty() ? 0.0 : accuracy.back(); }
};

// FedAvg over logistic regression on a separable two-class Gaussian task.
// The session config supplies N, tau, w and the setting; model size and
// epoch count follow the trainer config.
TrainingCurve ToyFedAvg(protocol::SessionConfig config, const TrainerConfig& trainer,
                        AggregationMode mode);

}  // namespace dhsa::harness

#endif  // DHSA_HARNESS_FEDAVG_H_
