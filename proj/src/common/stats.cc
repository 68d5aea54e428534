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


#include "dhsa/common/stats.h"

#include <boost/math/distributions/chi_squared.hpp>

#include "dhsa/common/errors.h"

namespace dhsa {

ChiSquareResult ChiSquareUniform(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) throw InvalidArgument("chi-square needs at least two buckets");
  double total = 0.0;
  for (std::uint64_t c : counts) total += static_cast<double>(c);
  if (total == 0.0) throw InvalidArgument("chi-square over an empty sample");
  const double expected = total / static_cast<double>(counts.size());
  ChiSquareResult r;
  for (std::uint64_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    r.statistic += d * d / expected;
  }
  r.degrees_of_freedom = static_cast<int>(counts.size()) - 1;
  boost::math::chi_squared dist(r.degrees_of_freedom);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace dhsa
