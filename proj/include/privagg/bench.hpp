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

// Packed vs naive hidden-weight aggregation on the control case study.
// Counts and bytes are exact and deterministic under a seed; wall times are
// informative only.

#pragma once

#include <algorithm>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "privagg/control.hpp"

namespace privagg::bench {

using control::CaseConfig;
using control::ShareMode;
using schemes::SchemeId;

inline constexpr std::string_view kCsvVersion = "# privagg-bench v1";

struct BenchRow {
  std::string sweep;
  SchemeId scheme = SchemeId::kPwsahPacked;
  ShareMode share_mode = ShareMode::kDealer;
  std::size_t M = 0, n = 0, m_dim = 0, kappa = 0, horizon = 0;
  double edge_prob = 0;
  sim::DegreeStats degree;
  std::size_t slots = 1;                      // m
  std::size_t ciphertexts_per_contribution = 0;
  std::size_t contribution_bytes = 0;         // ciphertext payload, no header
  std::size_t bytes_per_step = 0;             // every message of a step
  std::size_t share_bytes_per_step = 0;       // decentralized mask envelopes
  std::size_t share_bits_per_neighbor = 0;    // predicted
  OpCounters predicted;                       // all agents, all steps
  OpCounters measured;
  bool ops_match = false;                     // per agent
  bool exact = false;                         // trajectory equals oracle
  double online_ms_avg = 0, online_ms_min = 0, online_ms_max = 0;  // per agent per step
  double offline_ms = 0;
  std::optional<double> online_reduction_pct;  // packed rows: 1 - packed/naive on max online time
  std::optional<double> bytes_reduction_pct;
};

/// Online counters agent i should show for one step. As a contributor it
/// encrypts toward each neighbour j (rows m_j, columns n_i); as an
/// aggregator it multiplies and decrypts what its neighbours sent.
inline OpCounters predicted_agent_ops(const control::Plant& p, std::size_t i, SchemeId id, std::size_t m,
                                      unsigned l, unsigned lambda) {
  OpCounters ops;
  const auto nb = p.neighbors(i);
  for (std::size_t j : nb) {
    const auto c = schemes::predict_costs(id, p.neighbors(j).size(), p.agents[i].states(), p.agents[j].inputs(),
                                          id == SchemeId::kPwsahPacked ? m : 1, l, lambda);
    ops.exps += c.exps;
    ops.mults += c.cipher_adds;
    ops.encs += c.ciphertexts_sent;  // one masking encryption per ciphertext
  }
  if (!nb.empty()) {
    const std::size_t groups = id == SchemeId::kPwsahPacked ? ceil_div(p.agents[i].inputs(), m) : p.agents[i].inputs();
    ops.mults += groups * (nb.size() - 1);
    ops.decs += groups;
  }
  return ops;
}

inline BenchRow measure(const std::string& sweep, const CaseConfig& cfg) {
  const control::CaseStudyResult r = control::run_case_study(cfg);
  const control::Plant& p = r.plant;
  BenchRow row;
  row.sweep = sweep;
  row.scheme = cfg.scheme;
  row.share_mode = cfg.share_mode;
  row.M = cfg.M;
  row.n = cfg.n;
  row.m_dim = cfg.m_dim;
  row.kappa = cfg.kappa;
  row.horizon = cfg.horizon;
  row.edge_prob = cfg.edge_prob;
  row.degree = p.topology.degree_stats();
  row.slots = r.budget ? r.budget->m : 1;
  row.ciphertexts_per_contribution = r.contribution_ciphertexts.empty() ? 0 : r.contribution_ciphertexts[0];
  row.contribution_bytes = row.ciphertexts_per_contribution * ((2 * cfg.kappa + 7) / 8);
  row.share_bits_per_neighbor =
      schemes::predict_costs(cfg.scheme, std::max<std::size_t>(1, row.degree.max), cfg.n, cfg.m_dim, row.slots,
                             cfg.fmt.l(), cfg.lambda)
          .share_bits_per_neighbor;
  row.exact = r.exact();

  std::size_t online_bytes = 0, share_bytes = 0;
  std::set<std::size_t> online_rounds;
  for (const auto& h : r.trace.handlers)
    if (h.phase == "online") online_rounds.insert(h.round);
  for (const auto& m : r.trace.messages) {
    if (!online_rounds.count(m.round)) continue;
    online_bytes += m.bytes;
    if (m.kind.rfind("contrib/", 0) != 0) share_bytes += m.bytes;
  }
  const std::size_t steps = std::max<std::size_t>(1, cfg.horizon);
  row.bytes_per_step = online_bytes / steps;
  row.share_bytes_per_step = share_bytes / steps;

  row.ops_match = true;
  std::vector<double> per_agent;
  for (std::size_t i = 0; i < p.agents.size(); ++i) {
    OpCounters want = predicted_agent_ops(p, i, cfg.scheme, row.slots, cfg.fmt.l(), cfg.lambda);
    OpCounters per_step = want;
    for (std::size_t s = 1; s < cfg.horizon; ++s) want += per_step;
    if (cfg.horizon == 0) want = {};
    const OpCounters got = r.trace.ops_of(static_cast<sim::ParticipantId>(i + 1), "online");
    row.ops_match = row.ops_match && got == want;
    row.predicted += want;
    row.measured += got;
    per_agent.push_back(static_cast<double>(r.trace.wall_ns_of(static_cast<sim::ParticipantId>(i + 1), "online")) /
                        1e6 / static_cast<double>(steps));
  }
  if (!per_agent.empty()) {
    row.online_ms_min = *std::min_element(per_agent.begin(), per_agent.end());
    row.online_ms_max = *std::max_element(per_agent.begin(), per_agent.end());
    for (double v : per_agent) row.online_ms_avg += v;
    row.online_ms_avg /= static_cast<double>(per_agent.size());
  }
  std::int64_t offline = 0;
  for (const auto& h : r.trace.handlers)
    if (h.phase == "offline") offline += h.wall_ns;
  row.offline_ms = static_cast<double>(offline) / 1e6;
  return row;
}

/// Fills the reduction columns of packed rows from the naive row with the
/// same sweep point and share mode.
inline void fill_reductions(std::vector<BenchRow>& rows) {
  for (auto& packed : rows) {
    if (packed.scheme != SchemeId::kPwsahPacked) continue;
    for (const auto& naive : rows) {
      if (naive.scheme != SchemeId::kPwsah || naive.sweep != packed.sweep || naive.share_mode != packed.share_mode ||
          naive.M != packed.M || naive.n != packed.n || naive.m_dim != packed.m_dim ||
          naive.edge_prob != packed.edge_prob || naive.kappa != packed.kappa)
        continue;
      if (naive.online_ms_max > 0) packed.online_reduction_pct = 100.0 * (1.0 - packed.online_ms_max / naive.online_ms_max);
      if (naive.bytes_per_step > 0)
        packed.bytes_reduction_pct =
            100.0 * (1.0 - static_cast<double>(packed.bytes_per_step) / static_cast<double>(naive.bytes_per_step));
    }
  }
}

struct SweepSpec {
  std::string sweep = "edge-prob";  // or "input-dim"
  std::size_t M = 10;
  std::size_t dim = 6;              // n = m_dim for edge-prob
  std::vector<double> edge_probs{0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t degree = 10;          // input-dim: edge_prob = degree / (M - 1)
  std::size_t dim_lo = 2, dim_hi = 10;
  std::vector<ShareMode> modes{ShareMode::kDealer, ShareMode::kOneRound, ShareMode::kTwoRound};
  std::size_t kappa = 512;
  std::size_t horizon = 2;
  FixedFormat fmt{16, 16};
  unsigned lambda = 80;
  std::uint64_t seed = 1;
};

/// Configurations in canonical order: sweep point, share mode, naive then
/// packed. Naive and packed share a seed, so they see the same plant.
inline std::vector<CaseConfig> sweep_configs(const SweepSpec& s) {
  std::vector<CaseConfig> out;
  auto push = [&](std::size_t dim, double p) {
    for (ShareMode mode : s.modes)
      for (SchemeId id : {SchemeId::kPwsah, SchemeId::kPwsahPacked}) {
        CaseConfig c;
        c.M = s.M;
        c.n = c.m_dim = dim;
        c.fmt = s.fmt;
        c.lambda = s.lambda;
        c.kappa = s.kappa;
        c.horizon = s.horizon;
        c.edge_prob = p;
        c.scheme = id;
        c.share_mode = mode;
        c.seed = s.seed;
        out.push_back(c);
      }
  };
  if (s.sweep == "edge-prob") {
    for (double p : s.edge_probs) push(s.dim, p);
  } else if (s.sweep == "input-dim") {
    require(s.M >= 2 && s.degree < s.M, Errc::kConfig, "input-dim sweep needs degree < M");
    const double p = static_cast<double>(s.degree) / static_cast<double>(s.M - 1);
    for (std::size_t d = s.dim_lo; d <= s.dim_hi; ++d) push(d, p);
  } else {
    fail(Errc::kConfig, "unknown sweep '" + s.sweep + "'");
  }
  return out;
}

inline std::vector<BenchRow> run_sweep(const SweepSpec& s) {
  std::vector<BenchRow> rows;
  for (const auto& c : sweep_configs(s)) rows.push_back(measure(s.sweep, c));
  fill_reductions(rows);
  return rows;
}

/// With `with_wall` false every wall-time column is written as 0, which makes
/// the output byte-identical across runs with one seed.
inline void write_csv(std::ostream& os, const std::vector<BenchRow>& rows, bool with_wall = true) {
  os << kCsvVersion << '\n';
  os << "sweep,scheme,share_mode,M,n,m_dim,kappa,horizon,edge_prob,deg_min,deg_avg,deg_max,slots,"
        "ciphertexts_per_contribution,contribution_bytes,bytes_per_step,share_bytes_per_step,"
        "share_bits_per_neighbor,pred_exps,meas_exps,pred_mults,meas_mults,pred_encs,meas_encs,pred_decs,meas_decs,"
        "ops_match,exact,online_ms_avg,online_ms_min,online_ms_max,offline_ms,online_reduction_pct,"
        "bytes_reduction_pct\n";
  auto wall = [&](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << (with_wall ? v : 0.0);
    return s.str();
  };
  auto pct = [&](const std::optional<double>& v, bool is_wall) {
    if (!v) return std::string();
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << (is_wall && !with_wall ? 0.0 : *v);
    return s.str();
  };
  for (const auto& r : rows) {
    os << r.sweep << ',' << schemes::scheme_name(r.scheme) << ',' << control::share_mode_name(r.share_mode) << ','
       << r.M << ',' << r.n << ',' << r.m_dim << ',' << r.kappa << ',' << r.horizon << ',' << r.edge_prob << ','
       << r.degree.min << ',' << std::fixed << std::setprecision(2) << r.degree.avg << std::defaultfloat << ','
       << r.degree.max << ',' << r.slots << ',' << r.ciphertexts_per_contribution << ',' << r.contribution_bytes
       << ',' << r.bytes_per_step << ',' << r.share_bytes_per_step << ',' << r.share_bits_per_neighbor << ','
       << r.predicted.exps << ',' << r.measured.exps << ',' << r.predicted.mults << ',' << r.measured.mults << ','
       << r.predicted.encs << ',' << r.measured.encs << ',' << r.predicted.decs << ',' << r.measured.decs << ','
       << (r.ops_match ? 1 : 0) << ',' << (r.exact ? 1 : 0) << ',' << wall(r.online_ms_avg) << ','
       << wall(r.online_ms_min) << ',' << wall(r.online_ms_max) << ',' << wall(r.offline_ms) << ','
       << pct(r.online_reduction_pct, true) << ',' << pct(r.bytes_reduction_pct, false) << '\n';
  }
}

}  // namespace privagg::bench
