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


#ifndef DHSA_COMMON_STATS_H_
#define DHSA_COMMON_STATS_H_

#include <cstdint>
#include <span>

namespace dhsa {

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  // Upper-tail probability of the statistic under uniformity.
  double p_value = 1.0;

  bool Passes(double significance) const { return p_value >= significance; }
};

// Pearson chi-square goodness of fit of `counts` against the uniform
// distribution over its buckets. Requires at least two buckets.
ChiSquareResult ChiSquareUniform(std::span<const std::uint64_t> counts);

}  // namespace dhsa

#endif  // DHSA_COMMON_STATS_H_
