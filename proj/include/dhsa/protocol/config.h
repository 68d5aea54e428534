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


#ifndef DHSA_PROTOCOL_CONFIG_H_
#define DHSA_PROTOCOL_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "dhsa/codec/codec.h"
#include "dhsa/common/prng.h"
#include "dhsa/mkbfv/mkbfv.h"
#include "dhsa/ring/ring.h"
#include "dhsa/ring/sampler.h"
#include "dhsa/shprg/shprg.h"

namespace dhsa::protocol {

using mkbfv::PartyId;

struct SessionConfig {
  std::uint32_t num_clients = 10;
  std::size_t model_size = 1000;
  int w = 16;
  double m_min = -1.0;
  double m_max = 1.0;
  char setting = 'A';
  // Overrides the preset's log2 p when nonzero.
  int log_p = 0;
  std::size_t tau = 100;
  std::size_t epochs = 10;
  std::uint64_t master_seed = 1;
  PartyId leader = 0;
  ring::SamplerConfig sampler;
  // Columns of the SHPRG matrix kept in memory, shared by all parties.
  std::size_t matrix_cache_bytes = shprg::Shprg::kDefaultCacheBudget;
  // N = 1 is a degenerate single-client mode used to check that the
  // protocol reduces to plain quantized training; off by default.
  bool allow_single_client = false;

  // Throws InvalidArgument naming the violated invariant: N >= 2 (unless
  // allow_single_client), p > N(2^w - 1) with N <= p / 2^w, q_SHPRG divides
  // t, mu * tau > 0, epochs >= 1, leader < N, model_size >= 1.
  void Validate() const;

  Seed32 master() const { return SeedFromInt(master_seed); }
  Seed32 shprg_crs() const { return DeriveSeed(master(), "crs/shprg"); }
  Seed32 ring_crs() const { return DeriveSeed(master(), "crs/ring"); }

  shprg::ShprgParams shprg_params() const;
  codec::QuantParams quant_params() const;
  std::size_t msa_runs() const { return (epochs + tau - 1) / tau; }
};

// Public, immutable session material shared by every party.
struct SessionContext {
  SessionConfig config;
  ring::RingParamsPtr ring;
  shprg::Shprg shprg;
  codec::QuantParams quant;

  // Validates the config, builds the ring and warms the matrix cache.
  static std::shared_ptr<const SessionContext> Create(const SessionConfig& config);

  // CRS polynomial a for one MSA run.
  ring::RingElement RunCrs(std::uint32_t run) const;
  std::size_t arrays_per_run() const;
};

}  // namespace dhsa::protocol

#endif  // DHSA_PROTOCOL_CONFIG_H_
