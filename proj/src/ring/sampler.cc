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

#include "dhsa/ring/sampler.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "dhsa/common/errors.h"

namespace dhsa::ring {

void SamplerConfig::Validate() const {
  if (!(gaussian_sigma > 0.0)) throw InvalidArgument("gaussian_sigma must be positive");
  if (static_cast<double>(tail_bound) < 6.0 * gaussian_sigma) {
    throw InvalidArgument("tail_bound must be at least 6 * gaussian_sigma");
  }
}

DiscreteGaussian::DiscreteGaussian(const SamplerConfig& config) : config_(config) {
  config_.Validate();
  const int b = config_.tail_bound;
  const double two_var = 2.0 * config_.gaussian_sigma * config_.gaussian_sigma;
  std::vector<double> weights;
  weights.reserve(2 * b + 1);
  double total = 0.0;
  for (int x = -b; x <= b; ++x) {
    double w = std::exp(-static_cast<double>(x) * x / two_var);
    weights.push_back(w);
    total += w;
  }
  cdf_.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i] / total;
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
  cdf_.resize(std::bit_ceil(cdf_.size()), 2.0);
}

std::int64_t DiscreteGaussian::Sample(Prng& prng) const {
  // Branch-free binary search for the number of CDF entries <= u, over a
  // table padded to a power of two with entries above 1.
  const double u = prng.UniformUnit();
  std::size_t index = 0;
  for (std::size_t step = cdf_.size() / 2; step > 0; step >>= 1) {
    index += cdf_[index + step - 1] <= u ? step : 0;
  }
  return static_cast<std::int64_t>(index) - config_.tail_bound;
}

RingElement SampleUniform(const RingParamsPtr& params, Prng& prng) {
  // Independent uniform residues are uniform mod q by the CRT.
  RingElement r(params);
  for (std::size_t i = 0; i < params->num_primes(); ++i) {
    const std::uint64_t p = params->primes()[i];
    for (auto& v : r.residues(i)) v = prng.UniformBelow(p);
  }
  return r;
}

RingElement SampleTernary(const RingParamsPtr& params, Prng& prng) {
  std::vector<std::int64_t> coeffs(params->n());
  for (auto& c : coeffs) c = static_cast<std::int64_t>(prng.UniformBelow(3)) - 1;
  return RingElement::FromSigned(params, coeffs);
}

RingElement SampleGaussian(const RingParamsPtr& params, const SamplerConfig& config,
                           Prng& prng) {
  const DiscreteGaussian dist(config);
  std::vector<std::int64_t> coeffs(params->n());
  for (auto& c : coeffs) c = dist.Sample(prng);
  return RingElement::FromSigned(params, coeffs);
}

}  // namespace dhsa::ring
