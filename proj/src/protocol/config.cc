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


#include "dhsa/protocol/config.h"

#include <string>

#include "dhsa/common/errors.h"

namespace dhsa::protocol {

void SessionConfig::Validate() const {
  if (num_clients < 1) throw InvalidArgument("N >= 1 violated: no clients");
  if (num_clients < 2 && !allow_single_client) {
    throw InvalidArgument("N >= 2 violated: N=" + std::to_string(num_clients));
  }
  if (model_size < 1) throw InvalidArgument("model size must be positive");
  if (tau < 1) throw InvalidArgument("mu*tau > 0 violated: tau=0");
  if (epochs < 1) throw InvalidArgument("epochs must be at least 1");
  if (leader >= num_clients) {
    throw InvalidArgument("leader id " + std::to_string(leader) + " is not a client");
  }
  sampler.Validate();
  const shprg::ShprgParams sp = shprg_params();
  sp.Validate();
  const int log_t = ring::RingParams::Default()->log_t();
  if (sp.log_q > log_t) {
    throw InvalidArgument("q_SHPRG divides t violated: q=2^" + std::to_string(sp.log_q) +
                          ", t=2^" + std::to_string(log_t) + " (" + sp.Describe() + ")");
  }
  if (w >= sp.log_p) throw InvalidArgument("w must be smaller than log2 p");
  if (static_cast<std::uint64_t>(num_clients) > sp.MaxClients(w)) {
    throw InvalidArgument("p > N(2^w-1) violated: N=" + std::to_string(num_clients) +
                          " exceeds max clients " + std::to_string(sp.MaxClients(w)) +
                          " for " + sp.Describe() + ", w=" + std::to_string(w));
  }
  quant_params().Validate();
}

shprg::ShprgParams SessionConfig::shprg_params() const {
  shprg::ShprgParams sp = shprg::ShprgParams::Preset(setting, shprg_crs());
  if (log_p != 0) sp.log_p = log_p;
  return sp;
}

codec::QuantParams SessionConfig::quant_params() const {
  codec::QuantParams qp;
  qp.w = w;
  qp.m_min = m_min;
  qp.m_max = m_max;
  qp.num_parties = num_clients;
  qp.p = shprg_params().p();
  return qp;
}

std::shared_ptr<const SessionContext> SessionContext::Create(const SessionConfig& config) {
  config.Validate();
  auto ctx = std::make_shared<SessionContext>(SessionContext{
      config, ring::RingParams::Default(), shprg::Shprg(config.shprg_params()),
      config.quant_params()});
  ctx->shprg.CacheColumns(config.model_size, config.matrix_cache_bytes);
  return ctx;
}

ring::RingElement SessionContext::RunCrs(std::uint32_t run) const {
  Prng prng(DeriveSeed(config.ring_crs(), "run/" + std::to_string(run)));
  return ring::SampleUniform(ring, prng);
}

std::size_t SessionContext::arrays_per_run() const {
  return codec::PackedArrayCount(shprg.params().mu, config.tau, ring->n());
}

}  // namespace dhsa::protocol
