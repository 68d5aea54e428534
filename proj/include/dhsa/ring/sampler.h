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

#ifndef DHSA_RING_SAMPLER_H_
#define DHSA_RING_SAMPLER_H_

#include <cstdint>
#include <vector>

#include "dhsa/common/prng.h"
#include "dhsa/ring/ring.h"

namespace dhsa::ring {

// Error distribution psi (and phi): centered discrete Gaussian truncated to
// [-tail_bound, tail_bound]. Key distribution chi is uniform ternary.
struct SamplerConfig {
  double gaussian_sigma = 3.2;
  int tail_bound = 20;

  // Throws InvalidArgument unless sigma > 0 and tail_bound >= 6 * sigma.
  void Validate() const;
};

// Cumulative distribution table over the truncated support.
class DiscreteGaussian {
 public:
  explicit DiscreteGaussian(const SamplerConfig& config);

  std::int64_t Sample(Prng& prng) const;
  const SamplerConfig& config() const { return config_; }

 private:
  SamplerConfig config_;
  std::vector<double> cdf_;
};

RingElement SampleUniform(const RingParamsPtr& params, Prng& prng);
RingElement SampleTernary(const RingParamsPtr& params, Prng& prng);
RingElement SampleGaussian(const RingParamsPtr& params, const SamplerConfig& config,
                           Prng& prng);

}  // namespace dhsa::ring

#endif  // DHSA_RING_SAMPLER_H_
