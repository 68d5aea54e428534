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


#include "dhsa/harness/fedavg.h"

#include <cmath>
#include <random>
#include <span>

#include "dhsa/common/prng.h"
#include "dhsa/harness/session.h"

namespace dhsa::harness {

namespace {

struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

class Task {
 public:
  Task(const TrainerConfig& tc, std::uint32_t clients) : tc_(tc), prng_(SeedFromInt(tc.seed)) {
    std::normal_distribution<double> normal;
    direction_.resize(tc.features);
    double norm = 0;
    for (double& d : direction_) {
      d = normal(prng_);
      norm += d * d;
    }
    for (double& d : direction_) d /= std::sqrt(norm);
    for (std::uint32_t c = 0; c < clients; ++c) shards_.push_back(Sample(tc.samples_per_client));
    test_ = Sample(tc.test_samples);
  }

  const Dataset& shard(std::size_t c) const { return shards_[c]; }
  const Dataset& test() const { return test_; }

 private:
  Dataset Sample(std::size_t count) {
    std::normal_distribution<double> normal;
    Dataset d;
    while (d.x.size() < count) {
      const int label = static_cast<int>(prng_.UniformBelow(2));
      const double sign = label == 1 ? 1.0 : -1.0;
      std::vector<double> x(tc_.features);
      double proj = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = sign * tc_.separation * direction_[i] + normal(prng_);
        proj += x[i] * direction_[i];
      }
      if (sign * proj < tc_.margin) continue;
      d.x.push_back(std::move(x));
      d.y.push_back(label);
    }
    return d;
  }

  TrainerConfig tc_;
  Prng prng_;
  std::vector<double> direction_;
  std::vector<Dataset> shards_;
  Dataset test_;
};

// Weights are [w_1..w_d, b].
double Logit(std::span<const double> w, const std::vector<double>& x) {
  double z = w.back();
  for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * x[i];
  return z;
}

double Accuracy(std::span<const double> w, const Dataset& d) {
  std::size_t right = 0;
  for (std::size_t k = 0; k < d.x.size(); ++k) right += (Logit(w, d.x[k]) >= 0) == (d.y[k] == 1);
  return static_cast<double>(right) / static_cast<double>(d.x.size());
}

class Federation : public UpdateSource {
 public:
  Federation(const TrainerConfig& tc, std::uint32_t clients)
      : tc_(tc), task_(tc, clients), clients_(clients), global_(tc.features + 1, 0.0) {}

  // Local full-batch gradient steps from the global model; returns the delta.
  std::vector<double> Update(PartyId client, std::uint32_t /*epoch*/) override {
    const Dataset& d = task_.shard(client);
    std::vector<double> w = global_;
    std::vector<double> grad(w.size());
    for (std::size_t step = 0; step < tc_.local_steps; ++step) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = 0; k < d.x.size(); ++k) {
        const double err = 1.0 / (1.0 + std::exp(-Logit(w, d.x[k]))) - d.y[k];
        for (std::size_t i = 0; i < d.x[k].size(); ++i) grad[i] += err * d.x[k][i];
        grad.back() += err;
      }
      const double scale = tc_.learning_rate / static_cast<double>(d.x.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= scale * grad[i];
    }
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= global_[i];
    return w;
  }

  void OnAggregate(std::uint32_t /*epoch*/, std::span<const double> m0) override {
    for (std::size_t i = 0; i < global_.size(); ++i) global_[i] += m0[i] / clients_;
    curve_.accuracy.push_back(Accuracy(global_, task_.test()));
  }

  TrainingCurve Finish() {
    curve_.weights = global_;
    return std::move(curve_);
  }

 private:
  TrainerConfig tc_;
  Task task_;
  double clients_;
  std::vector<double> global_;
  TrainingCurve curve_;
};

}  // namespace

TrainingCurve ToyFedAvg(protocol::SessionConfig config, const TrainerConfig& trainer,
                        AggregationMode mode) {
  config.model_size = trainer.features + 1;
  config.epochs = trainer.epochs;
  Federation fed(trainer, config.num_clients);
  if (mode == AggregationMode::kDhsa) {
    const SessionResult result = RunSession(config, fed);
    TrainingCurve curve = fed.Finish();
    curve.clipped = result.report.clipped;
    return curve;
  }
  for (std::uint32_t e = 0; e < trainer.epochs; ++e) {
    std::vector<double> sum(config.model_size, 0.0);
    for (PartyId c = 0; c < config.num_clients; ++c) {
      const std::vector<double> u = fed.Update(c, e);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += u[i];
    }
    fed.OnAggregate(e, sum);
  }
  return fed.Finish();
}

}  // namespace dhsa::harness
