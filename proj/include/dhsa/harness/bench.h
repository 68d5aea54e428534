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


#ifndef DHSA_HARNESS_BENCH_H_
#define DHSA_HARNESS_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace dhsa::harness {

struct TimingPolicy {
  int max_reps = 100;
  int min_reps = 3;
  // Stop repeating a cell once this much time was spent on it.
  double budget_ms = 3000.0;
};

struct Timing {
  double median_ms = 0.0;
  int reps = 0;
};

Timing MedianTime(const std::function<void()>& body, const TimingPolicy& policy);

// One uncached mask expansion of length m.
Timing TimeExpand(char setting, std::size_t m, const TimingPolicy& policy);

struct MsaClientTiming {
  std::size_t ciphertexts = 0;
  Timing keygen;
  Timing enc;
  Timing pks;
  Timing dec;

  double total_ms() const {
    return keygen.median_ms + enc.median_ms + pks.median_ms + dec.median_ms;
  }
};

// Client-side cost of one MSA run: key generation, encryption of all packed
// seed arrays, one PKS share per ciphertext, decryption under sk_r.
MsaClientTiming TimeMsaClient(char setting, std::size_t tau, const TimingPolicy& policy);

struct BenchConfig {
  std::vector<char> settings{'A', 'B', 'C', 'D'};
  std::vector<std::size_t> model_sizes{10000, 100000, 1000000};
  std::vector<std::uint32_t> clients{10};
  std::vector<std::size_t> taus{100};
  TimingPolicy policy;
};

struct BenchRow {
  char setting = 'A';
  std::size_t m = 0;
  std::uint32_t n = 0;
  std::size_t tau = 0;
  Timing expand;
  MsaClientTiming msa;
  // Per-client upload bytes including envelopes.
  std::uint64_t hma_upload_bytes = 0;
  std::uint64_t msa_upload_bytes = 0;
};

std::vector<BenchRow> RunBench(const BenchConfig& config,
                               const std::function<void(const BenchRow&)>& on_row = {});

// Fixed column order; see the header line.
void WriteBenchCsvHeader(std::ostream& out);
void WriteBenchCsvRow(std::ostream& out, const BenchRow& row);

}  // namespace dhsa::harness

#endif  // DHSA_HARNESS_BENCH_H_
