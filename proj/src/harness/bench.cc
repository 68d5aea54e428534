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


#include "dhsa/harness/bench.h"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <utility>

#include "dhsa/bfv/bfv.h"
#include "dhsa/codec/codec.h"
#include "dhsa/mkbfv/mkbfv.h"
#include "dhsa/protocol/messages.h"
#include "dhsa/ring/sampler.h"
#include "dhsa/shprg/shprg.h"

namespace dhsa::harness {

namespace {

using Clock = std::chrono::steady_clock;

const Seed32& BenchSeed() {
  static const Seed32 seed = SeedFromInt(0xBE7C);
  return seed;
}

std::uint64_t MsaUploadBytes(const shprg::ShprgParams& sp, std::size_t tau) {
  const auto ring = ring::RingParams::Default();
  const std::size_t cts = codec::PackedArrayCount(sp.mu, tau, ring->n());
  const std::size_t env = protocol::Envelope::kSize;
  const std::size_t element = ring::SerializedSize(*ring);
  const std::size_t pk = env + element;
  const std::size_t enc = env + 4 + cts * bfv::CiphertextSize(*ring);
  const mkbfv::KeySwitchShare blank{ring::RingElement(ring), ring::RingElement(ring), 0};
  const std::size_t share = protocol::EncodeShares(std::span(&blank, 1)).size() - 4;
  const std::size_t shares = env + 4 + cts * share;
  return pk + enc + shares;
}

}  // namespace

Timing MedianTime(const std::function<void()>& body, const TimingPolicy& policy) {
  std::vector<double> samples;
  double spent = 0;
  while (static_cast<int>(samples.size()) < policy.max_reps &&
         (static_cast<int>(samples.size()) < policy.min_reps || spent < policy.budget_ms)) {
    const auto start = Clock::now();
    body();
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    samples.push_back(ms);
    spent += ms;
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t k = samples.size();
  const double median = k % 2 == 1 ? samples[k / 2] : 0.5 * (samples[k / 2 - 1] + samples[k / 2]);
  return {median, static_cast<int>(k)};
}

Timing TimeExpand(char setting, std::size_t m, const TimingPolicy& policy) {
  const shprg::Shprg g(shprg::ShprgParams::Preset(setting, DeriveSeed(BenchSeed(), "crs")));
  Prng prng(DeriveSeed(BenchSeed(), "expand"));
  const shprg::Seed seed = g.SampleSeed(prng);
  return MedianTime([&] { g.Expand(seed, m); }, policy);
}

MsaClientTiming TimeMsaClient(char setting, std::size_t tau, const TimingPolicy& policy) {
  const auto ring = ring::RingParams::Default();
  const ring::SamplerConfig sampler;
  const shprg::ShprgParams sp = shprg::ShprgParams::Preset(setting, DeriveSeed(BenchSeed(), "crs"));
  Prng prng(DeriveSeed(BenchSeed(), "msa"));
  const ring::RingElement crs = ring::SampleUniform(ring, prng).ToNtt();

  MsaClientTiming t;
  t.ciphertexts = codec::PackedArrayCount(sp.mu, tau, ring->n());
  std::vector<bfv::Plaintext> arrays(t.ciphertexts);
  for (auto& a : arrays) {
    a.coeffs.resize(ring->n());
    for (auto& c : a.coeffs) c = prng.Next64();
  }
  const bfv::KeyPair kp = bfv::KeyGen(ring, crs, prng, sampler);
  const mkbfv::ReEncKeyPair reenc = mkbfv::GenReEncKeyPair(ring, crs, prng, sampler);
  std::vector<bfv::Ciphertext> cts;
  for (const auto& a : arrays) cts.push_back(bfv::Encrypt(kp.pk, a, prng, sampler));

  t.keygen = MedianTime([&] { bfv::KeyGen(ring, crs, prng, sampler); }, policy);
  t.enc = MedianTime([&] {
    for (const auto& a : arrays) bfv::Encrypt(kp.pk, a, prng, sampler);
  }, policy);
  t.pks = MedianTime([&] {
    for (const auto& ct : cts) mkbfv::PksShare(kp.sk, ct, reenc.pk_r, 0, prng, sampler);
  }, policy);
  t.dec = MedianTime([&] {
    for (const auto& ct : cts) bfv::Decrypt(reenc.sk_r, ct);
  }, policy);
  return t;
}

std::vector<BenchRow> RunBench(const BenchConfig& config,
                               const std::function<void(const BenchRow&)>& on_row) {
  std::vector<BenchRow> rows;
  std::map<std::pair<char, std::size_t>, MsaClientTiming> msa_cache;
  for (char setting : config.settings) {
    const shprg::ShprgParams sp = shprg::ShprgParams::Preset(setting, BenchSeed());
    for (std::size_t m : config.model_sizes) {
      const Timing expand = TimeExpand(setting, m, config.policy);
      for (std::size_t tau : config.taus) {
        auto key = std::make_pair(setting, tau);
        if (!msa_cache.contains(key)) msa_cache[key] = TimeMsaClient(setting, tau, config.policy);
        for (std::uint32_t n : config.clients) {
          BenchRow row;
          row.setting = setting;
          row.m = m;
          row.n = n;
          row.tau = tau;
          row.expand = expand;
          row.msa = msa_cache[key];
          row.hma_upload_bytes = protocol::Envelope::kSize + codec::MaskedSize(m, sp.log_p);
          row.msa_upload_bytes = MsaUploadBytes(sp, tau);
          if (on_row) on_row(row);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

void WriteBenchCsvHeader(std::ostream& out) {
  out << "setting,M,N,tau,expand_ms,expand_reps,msa_keygen_ms,msa_enc_ms,msa_pks_ms,"
         "msa_dec_ms,msa_total_ms,msa_per_epoch_ms,msa_ciphertexts,hma_upload_bytes,"
         "msa_upload_bytes\n";
}

void WriteBenchCsvRow(std::ostream& out, const BenchRow& r) {
  out << r.setting << ',' << r.m << ',' << r.n << ',' << r.tau << ',' << r.expand.median_ms << ','
      << r.expand.reps << ',' << r.msa.keygen.median_ms << ',' << r.msa.enc.median_ms << ','
      << r.msa.pks.median_ms << ',' << r.msa.dec.median_ms << ',' << r.msa.total_ms() << ','
      << r.msa.total_ms() / static_cast<double>(r.tau) << ',' << r.msa.ciphertexts << ','
      << r.hma_upload_bytes << ',' << r.msa_upload_bytes << '\n';
}

}  // namespace dhsa::harness
