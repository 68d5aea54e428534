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


// Command-line driver: params, run, bench, audit, train.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dhsa/common/alloc.h"
#include "dhsa/common/errors.h"
#include "dhsa/harness/audit.h"
#include "dhsa/harness/bench.h"
#include "dhsa/harness/fedavg.h"
#include "dhsa/harness/session.h"
#include "json.hpp"

namespace {

using dhsa::harness::SessionConfig;
using nlohmann::json;

enum ExitCode { kOk = 0, kInvalidConfig = 2, kAborted = 3, kIoError = 4 };

struct Overrides {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<char> setting;
  std::optional<std::uint32_t> n_clients;
  std::optional<std::size_t> model_size;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> tau;
  std::optional<int> log_p;
  std::optional<int> w;
};

std::string U128ToString(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

char ParseSetting(const std::string& v) {
  if (v.size() != 1 || v[0] < 'A' || v[0] > 'D') {
    throw dhsa::InvalidArgument("setting must be one of A, B, C, D (got '" + v + "')");
  }
  return v[0];
}

// Flat key = value file; '#' starts a comment.
void ApplyConfigFile(const std::string& path, SessionConfig& c) {
  std::ifstream in(path);
  if (!in) throw dhsa::InvalidArgument("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = Trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw dhsa::InvalidArgument(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    try {
      if (key == "setting") c.setting = ParseSetting(value);
      else if (key == "n_clients") c.num_clients = static_cast<std::uint32_t>(std::stoul(value));
      else if (key == "model_size") c.model_size = std::stoull(value);
      else if (key == "epochs") c.epochs = std::stoull(value);
      else if (key == "tau") c.tau = std::stoull(value);
      else if (key == "seed") c.master_seed = std::stoull(value);
      else if (key == "w") c.w = std::stoi(value);
      else if (key == "log_p") c.log_p = std::stoi(value);
      else if (key == "m_min") c.m_min = std::stod(value);
      else if (key == "m_max") c.m_max = std::stod(value);
      else if (key == "leader") c.leader = static_cast<std::uint32_t>(std::stoul(value));
      else if (key == "sigma") c.sampler.gaussian_sigma = std::stod(value);
      else if (key == "matrix_cache_mb") c.matrix_cache_bytes = std::stoull(value) << 20;
      else throw dhsa::InvalidArgument(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      throw dhsa::InvalidArgument(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
}

SessionConfig Resolve(const Overrides& o) {
  SessionConfig c;
  if (!o.config_path.empty()) ApplyConfigFile(o.config_path, c);
  if (o.seed) c.master_seed = *o.seed;
  if (o.setting) c.setting = *o.setting;
  if (o.n_clients) c.num_clients = *o.n_clients;
  if (o.model_size) c.model_size = *o.model_size;
  if (o.epochs) c.epochs = *o.epochs;
  if (o.tau) c.tau = *o.tau;
  if (o.log_p) c.log_p = *o.log_p;
  if (o.w) c.w = *o.w;
  c.Validate();
  return c;
}

void Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::ios_base::failure("cannot write " + path);
}

json ParamsJson(const SessionConfig& c) {
  const auto ring = dhsa::ring::RingParams::Default();
  const dhsa::shprg::ShprgParams sp = c.shprg_params();
  json primes = json::array();
  for (std::uint64_t p : ring->primes()) primes.push_back(p);
  return {{"session", dhsa::harness::ConfigToJson(c)},
          {"shprg", {{"setting", std::string(1, sp.setting)},
                     {"mu", sp.mu},
                     {"p", "2^" + std::to_string(sp.log_p)},
                     {"q", "2^" + std::to_string(sp.log_q)},
                     {"max_clients", sp.MaxClients(c.w)}}},
          {"bfv", {{"n", ring->n()},
                   {"primes", primes},
                   {"q", U128ToString(ring->q())},
                   {"q_bits", ring->q_bits()},
                   {"t", "2^" + std::to_string(ring->log_t())},
                   {"delta", U128ToString(ring->delta())},
                   {"sigma", c.sampler.gaussian_sigma}}},
          {"derived", {{"ciphertexts_per_msa_run",
                        dhsa::codec::PackedArrayCount(sp.mu, c.tau, ring->n())},
                       {"msa_runs", c.msa_runs()},
                       {"total_rounds", c.epochs + 3 * c.msa_runs()},
                       {"hma_upload_bytes",
                        dhsa::protocol::Envelope::kSize + dhsa::codec::MaskedSize(c.model_size, sp.log_p)}}}};
}

struct Failure {
  int code;
  dhsa::harness::ErrorInfo info;
};

// Runs `body`, mapping exceptions to an exit code and a machine-readable error.
template <typename F>
int Guarded(const std::string& out_path, F&& body) {
  std::optional<Failure> failure;
  try {
    body();
    return kOk;
  } catch (const dhsa::SessionAbort& e) {
    failure = Failure{kAborted, {"session_abort", e.phase(), e.what()}};
  } catch (const dhsa::InvalidArgument& e) {
    failure = Failure{kInvalidConfig, {"invalid_config", "setup", e.what()}};
  } catch (const dhsa::Error& e) {
    failure = Failure{kAborted, {"protocol_error", "", e.what()}};
  } catch (const std::ios_base::failure& e) {
    failure = Failure{kIoError, {"io_error", "", e.what()}};
  }
  std::cerr << "error: " << failure->info.message << "\n";
  const std::string report = json{{"error", dhsa::harness::ErrorToJson(failure->info)}}.dump(2) + "\n";
  try {
    if (!out_path.empty() && out_path != "-") Emit(out_path, report);
    else std::cout << report;
  } catch (const std::ios_base::failure&) {
  }
  return failure->code;
}

std::vector<std::size_t> ParseSizes(const std::string& list) {
  std::vector<std::size_t> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(static_cast<std::size_t>(std::stod(Trim(tok))));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  dhsa::RetainFreedMemory();
  CLI::App app{"Doubly homomorphic secure aggregation: simulator and tools"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Overrides o;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "key = value session config file");
    sub->add_option("--out", o.out_path, "output file (default stdout)");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option_function<std::string>(
        "--setting", [&o](const std::string& v) { o.setting = ParseSetting(v); },
        "SHPRG setting A, B, C or D");
    sub->add_option("--n-clients", o.n_clients, "number of clients N");
    sub->add_option("--model-size", o.model_size, "model length M");
    sub->add_option("--epochs", o.epochs, "epochs T");
    sub->add_option("--tau", o.tau, "seed pairs per MSA run");
    sub->add_option("--log-p", o.log_p, "override log2 p of the setting");
    sub->add_option("--w", o.w, "quantization bits w");
  };

  CLI::App* params = app.add_subcommand("params", "print resolved parameters");
  common(params);

  CLI::App* run = app.add_subcommand("run", "simulate a session and write its report");
  common(run);
  std::string transcript_path;
  run->add_option("--transcript", transcript_path, "also dump the binary transcript");

  CLI::App* bench = app.add_subcommand("bench", "time mask expansion and MSA client work (CSV)");
  common(bench);
  std::string bench_settings = "ABCD";
  std::string bench_sizes = "1e4,1e5,1e6";
  int reps = 100;
  bench->add_option("--settings", bench_settings, "settings to time, e.g. AD");
  bench->add_option("--sizes", bench_sizes, "comma-separated model sizes");
  bench->add_option("--reps", reps, "maximum repetitions per cell");

  CLI::App* audit = app.add_subcommand("audit", "run a session and audit a colluding view");
  common(audit);
  std::string collude;
  audit->add_option("--collude", collude, "colluders, e.g. server,3,5");

  CLI::App* train = app.add_subcommand("train", "toy FedAvg, plain vs DHSA accuracy curves (CSV)");
  common(train);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*params) {
    return Guarded(o.out_path, [&] { Emit(o.out_path, ParamsJson(Resolve(o)).dump(2) + "\n"); });
  }
  if (*run) {
    return Guarded(o.out_path, [&] {
      const SessionConfig c = Resolve(o);
      dhsa::harness::RandomUpdates src(c);
      dhsa::harness::SessionOptions opt;
      opt.keep_payloads = !transcript_path.empty();
      const dhsa::harness::SessionResult r = dhsa::harness::RunSession(c, src, opt);
      if (!transcript_path.empty()) {
        std::ofstream t(transcript_path, std::ios::binary);
        r.transcript.WriteBinary(t);
        if (!t) throw std::ios_base::failure("cannot write " + transcript_path);
      }
      Emit(o.out_path, r.report.ToJson().dump(2) + "\n");
    });
  }
  if (*bench) {
    return Guarded(o.out_path, [&] {
      dhsa::harness::BenchConfig b;
      b.settings.clear();
      for (char s : bench_settings) b.settings.push_back(ParseSetting(std::string(1, s)));
      b.model_sizes = ParseSizes(bench_sizes);
      if (o.model_size) b.model_sizes = {*o.model_size};
      if (o.n_clients) b.clients = {*o.n_clients};
      if (o.tau) b.taus = {*o.tau};
      b.policy.max_reps = reps;
      std::ostringstream csv;
      dhsa::harness::WriteBenchCsvHeader(csv);
      dhsa::harness::RunBench(b, [&](const dhsa::harness::BenchRow& row) {
        dhsa::harness::WriteBenchCsvRow(csv, row);
        std::cerr << "bench: setting " << row.setting << " M=" << row.m << " done\n";
      });
      Emit(o.out_path, csv.str());
    });
  }
  if (*audit) {
    return Guarded(o.out_path, [&] {
      const SessionConfig c = Resolve(o);
      const dhsa::harness::Colluders colluders = dhsa::harness::ParseColluders(collude);
      dhsa::harness::RandomUpdates src(c);
      dhsa::harness::SessionOptions opt;
      opt.keep_payloads = true;
      const dhsa::harness::SessionResult r = dhsa::harness::RunSession(c, src, opt);
      const auto report = dhsa::harness::AuditColludingView(c, r.transcript, colluders);
      Emit(o.out_path, report.ToJson(1e-3).dump(2) + "\n");
    });
  }
  return Guarded(o.out_path, [&] {
    SessionConfig c = Resolve(o);
    dhsa::harness::TrainerConfig tc;
    if (o.epochs) tc.epochs = *o.epochs;
    const auto plain = dhsa::harness::ToyFedAvg(c, tc, dhsa::harness::AggregationMode::kPlain);
    const auto secure = dhsa::harness::ToyFedAvg(c, tc, dhsa::harness::AggregationMode::kDhsa);
    std::ostringstream csv;
    csv << "epoch,plain_accuracy,dhsa_accuracy\n";
    for (std::size_t e = 0; e < plain.accuracy.size(); ++e) {
      csv << e + 1 << ',' << plain.accuracy[e] << ',' << secure.accuracy[e] << '\n';
    }
    Emit(o.out_path, csv.str());
  });
}
