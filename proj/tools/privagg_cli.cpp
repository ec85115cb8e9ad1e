// Copyright 2026 The privagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// privagg: budget | run-scheme | run-case-study | bench | selftest
// Exit codes: 0 ok, 1 oracle mismatch or guard failure, 2 config error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "privagg/bench.hpp"
#include "privagg/control.hpp"
#include "privagg/scheme_run.hpp"
#include "privagg/selftest.hpp"

namespace {

using namespace privagg;

constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;

/// "-" or empty means stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) fail(Errc::kConfig, "cannot write '" + path + "'");
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string join(const schemes::Vector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
  return s;
}

int cmd_budget(unsigned l, unsigned lambda, std::size_t n, std::size_t M, std::size_t bits) {
  if (l == 0 || n == 0 || M == 0 || bits == 0) fail(Errc::kConfig, "budget arguments must be positive");
  const BitBudget b = bit_budget(l, lambda, n, M, bits);
  std::cout << "gamma=" << b.gamma << ",delta=" << b.delta << ",m=" << b.m << '\n';
  if (b.m == 0) {
    std::cerr << "no slot of " << b.delta << " bits fits a " << bits << "-bit plaintext\n";
    return kExitMismatch;
  }
  return 0;
}

int cmd_run_scheme(const std::string& scheme, const std::string& cfg_path, const std::string& transcript,
                   const std::string& trace) {
  std::optional<schemes::SchemeId> id;
  if (!scheme.empty()) id = schemes::parse_scheme(scheme);
  const auto spec = schemes::parse_scheme_run(config::KeyValues::load(cfg_path), id);
  const auto r = schemes::execute(spec);
  std::cout << "scheme=" << schemes::scheme_name(spec.scheme) << '\n';
  std::cout << "aggregate=" << join(r.aggregate) << '\n';
  std::cout << "oracle=" << join(r.oracle) << '\n';
  if (!transcript.empty()) {
    Sink s(transcript);
    schemes::write_transcript(s.out(), r.contributions);
  }
  if (!trace.empty()) {
    Sink s(trace);
    r.trace.write_csv(s.out());
  }
  std::cout << "oracle-match " << (r.matches() ? "OK" : "FAIL") << '\n';
  return r.matches() ? 0 : kExitMismatch;
}

int cmd_case_study(const std::string& cfg_path, const std::string& scheme, const std::string& mode,
                   const std::string& trajectory, const std::string& trace) {
  control::CaseConfig cfg = control::parse_case_config(config::KeyValues::load(cfg_path));
  if (!scheme.empty()) {
    cfg.scheme = schemes::parse_scheme(scheme);
    if (cfg.scheme != schemes::SchemeId::kPwsah && cfg.scheme != schemes::SchemeId::kPwsahPacked)
      fail(Errc::kConfig, "case study runs pwsah or pwsah* only");
  }
  if (!mode.empty()) cfg.share_mode = control::parse_share_mode(mode);
  const auto r = control::run_case_study(cfg);
  {
    Sink s(trajectory);
    control::write_trajectory_csv(s.out(), r.encrypted, r.oracle);
  }
  if (!trace.empty()) {
    Sink s(trace);
    r.trace.write_csv(s.out());
  }
  std::ostream& log = trajectory.empty() || trajectory == "-" ? std::cerr : std::cout;
  log << "agents=" << cfg.M << " steps=" << cfg.horizon << " scheme=" << schemes::scheme_name(cfg.scheme)
      << " share_mode=" << control::share_mode_name(cfg.share_mode) << '\n';
  if (r.budget) log << "gamma=" << r.budget->gamma << ",delta=" << r.budget->delta << ",m=" << r.budget->m << '\n';
  log << "oracle-match " << (r.exact() ? "OK" : "FAIL") << '\n';
  return r.exact() ? 0 : kExitMismatch;
}

int cmd_bench(bench::SweepSpec spec, const std::string& modes, const std::string& out, bool no_wall) {
  if (!modes.empty()) {
    spec.modes.clear();
    std::string m;
    std::istringstream in(modes);
    while (std::getline(in, m, ',')) spec.modes.push_back(control::parse_share_mode(config::trim(m)));
  }
  const auto rows = bench::run_sweep(spec);
  Sink s(out);
  bench::write_csv(s.out(), rows, !no_wall);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.ops_match && r.exact;
  if (!ok) std::cerr << "measured counts differ from predictions or a trajectory mismatched\n";
  return ok ? 0 : kExitMismatch;
}

int cmd_selftest() {
  bool ok = true;
  for (const auto& c : selftest::run_all()) {
    std::cout << (c.ok ? "ok   " : "FAIL ") << c.name;
    if (!c.ok) std::cout << ": " << c.detail;
    std::cout << '\n';
    ok = ok && c.ok;
  }
  std::cout << (ok ? "selftest passed" : "selftest failed") << '\n';
  return ok ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private weighted-sum aggregation: budgets, scheme runs, case study, benchmarks"};
  app.require_subcommand(1);

  unsigned l = 32, lambda = 80;
  std::size_t n = 6, M = 50, bits = 2048;
  auto* budget = app.add_subcommand("budget", "Slot sizing (gamma, delta, m) for the packed scheme");
  budget->add_option("--l", l, "Bits per fixed-point value (l_i + l_f)")->required();
  budget->add_option("--lambda", lambda, "Statistical security bits")->required();
  budget->add_option("--n", n, "Inputs per agent")->required();
  budget->add_option("--M", M, "Number of agents")->required();
  budget->add_option("--bits", bits, "Bit length of N")->required();

  std::string scheme, cfg_path, transcript, trace;
  auto* run = app.add_subcommand("run-scheme", "Run one scheme instance from a config file");
  run->add_option("--scheme", scheme, "psa1, psa2, pwsac, pwsah or pwsah* (overrides the config)");
  run->add_option("--config", cfg_path, "key = value file")->required();
  run->add_option("--transcript", transcript, "Write the contribution transcript here");
  run->add_option("--trace", trace, "Write the simulator trace CSV here");

  std::string case_cfg, case_scheme, case_mode, trajectory = "-", case_trace;
  auto* cs = app.add_subcommand("run-case-study", "Encrypted distributed control vs the plaintext oracle");
  cs->add_option("--config", case_cfg, "key = value file")->required();
  cs->add_option("--scheme", case_scheme, "pwsah or pwsah* (overrides the config)");
  cs->add_option("--share-mode", case_mode, "dealer, one-round or two-round (overrides the config)");
  cs->add_option("--trajectory", trajectory, "Trajectory CSV path, - for stdout");
  cs->add_option("--trace", case_trace, "Simulator trace CSV path");

  bench::SweepSpec sweep;
  std::string modes, bench_out = "-";
  bool no_wall = false;
  std::optional<std::size_t> bench_M, bench_kappa;
  auto* bench_cmd = app.add_subcommand("bench", "Packed vs naive sweep, CSV output");
  bench_cmd->add_option("--sweep", sweep.sweep, "edge-prob or input-dim")->check(CLI::IsMember({"edge-prob", "input-dim"}));
  bench_cmd->add_option("--M", bench_M, "Agents (default 10 for edge-prob, 25 for input-dim)");
  bench_cmd->add_option("--deg", sweep.degree, "Target average degree for input-dim");
  bench_cmd->add_option("--dim", sweep.dim, "n = m_dim for edge-prob");
  bench_cmd->add_option("--dim-lo", sweep.dim_lo, "First dimension for input-dim");
  bench_cmd->add_option("--dim-hi", sweep.dim_hi, "Last dimension for input-dim");
  bench_cmd->add_option("--edge-probs", sweep.edge_probs, "Edge probabilities for edge-prob")->delimiter(',');
  bench_cmd->add_option("--modes", modes, "Share modes, comma separated");
  bench_cmd->add_option("--kappa", bench_kappa, "Bit length of each agent's N (default 512, 2048 for input-dim)");
  bench_cmd->add_option("--horizon", sweep.horizon, "Steps per run");
  bench_cmd->add_option("--seed", sweep.seed, "Seed");
  bench_cmd->add_option("--out", bench_out, "CSV path, - for stdout");
  bench_cmd->add_flag("--no-wall", no_wall, "Write wall-time columns as 0 (byte-identical output)");

  auto* self = app.add_subcommand("selftest", "Golden values at toy moduli");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*budget) return cmd_budget(l, lambda, n, M, bits);
    if (*run) return cmd_run_scheme(scheme, cfg_path, transcript, trace);
    if (*cs) return cmd_case_study(case_cfg, case_scheme, case_mode, trajectory, case_trace);
    if (*bench_cmd) {
      const bool input_dim = sweep.sweep == "input-dim";
      sweep.M = bench_M.value_or(input_dim ? 25 : 10);
      sweep.kappa = bench_kappa.value_or(input_dim ? 2048 : 512);
      if (input_dim && modes.empty()) modes = "dealer";
      return cmd_bench(sweep, modes, bench_out, no_wall);
    }
    if (*self) return cmd_selftest();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::kConfig || e.code() == Errc::kInvalidArgument ? kExitConfig : kExitMismatch;
  }
  return 0;
}
