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

// Encrypted distributed control. Agent i runs
//   x_i(t+1) = A_i x_i(t) + B_i u_i(t)
//   u_i(t)   = K_ii x_i(t) + sum_{j in N_i} K_ij x_j(t)
// and aggregates the neighbour terms K_ij x_j under its own Paillier key with
// a hidden-weight scheme. The system operator deals E_i(K_ij).
//
// Fixed point: every product carries 2 l_f fractional bits and is rounded
// back to l_f bits (round_shift) before it is used again, in the encrypted
// run and in the oracle alike, so the two trajectories agree exactly.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "privagg/config.hpp"
#include "privagg/encoding.hpp"
#include "privagg/schemes.hpp"
#include "privagg/simnet.hpp"
#include "privagg/zeroshares.hpp"

namespace privagg::control {

using schemes::SchemeId;
using schemes::Vector;

enum class ShareMode { kDealer, kOneRound, kTwoRound };

inline std::string_view share_mode_name(ShareMode m) {
  switch (m) {
    case ShareMode::kDealer: return "dealer";
    case ShareMode::kOneRound: return "one-round";
    case ShareMode::kTwoRound: return "two-round";
  }
  return "?";
}

inline ShareMode parse_share_mode(std::string_view s) {
  if (s == "dealer" || s == "centralized") return ShareMode::kDealer;
  if (s == "one-round" || s == "one_round") return ShareMode::kOneRound;
  if (s == "two-round" || s == "two_round" || s == "relay") return ShareMode::kTwoRound;
  fail(Errc::kConfig, "unknown share mode '" + std::string(s) + "'");
}

struct CaseConfig {
  std::size_t M = 6;
  std::size_t n = 2;      // state dimension per agent
  std::size_t m_dim = 2;  // input dimension per agent
  FixedFormat fmt{16, 16};
  unsigned lambda = 80;
  std::size_t kappa = 512;
  std::size_t horizon = 20;
  double edge_prob = 0.5;
  SchemeId scheme = SchemeId::kPwsahPacked;
  ShareMode share_mode = ShareMode::kDealer;
  std::uint64_t seed = 1;
};

inline CaseConfig parse_case_config(const config::KeyValues& kv) {
  kv.restrict_to({"M", "n", "m_dim", "l_i", "l_f", "lambda", "kappa", "horizon", "edge_prob", "scheme", "share_mode",
                  "seed"});
  CaseConfig c;
  c.M = kv.number_or<std::size_t>("M", c.M);
  c.n = kv.number_or<std::size_t>("n", c.n);
  c.m_dim = kv.number_or<std::size_t>("m_dim", c.m_dim);
  c.fmt.l_i = kv.number_or<unsigned>("l_i", c.fmt.l_i);
  c.fmt.l_f = kv.number_or<unsigned>("l_f", c.fmt.l_f);
  c.lambda = kv.number_or<unsigned>("lambda", c.lambda);
  c.kappa = kv.number_or<std::size_t>("kappa", c.kappa);
  c.horizon = kv.number_or<std::size_t>("horizon", c.horizon);
  c.edge_prob = kv.number_or<double>("edge_prob", c.edge_prob);
  c.seed = kv.number_or<std::uint64_t>("seed", c.seed);
  if (kv.has("scheme")) {
    try {
      c.scheme = schemes::parse_scheme(kv.text("scheme"));
    } catch (const Error&) {
      fail(Errc::kConfig, "unknown scheme '" + kv.text("scheme") + "'");
    }
    if (c.scheme != SchemeId::kPwsah && c.scheme != SchemeId::kPwsahPacked)
      fail(Errc::kConfig, "case study runs pwsah or pwsah* only");
  }
  if (kv.has("share_mode")) c.share_mode = parse_share_mode(kv.text("share_mode"));

  if (c.M < 1 || c.n < 1 || c.m_dim < 1) fail(Errc::kConfig, "M, n and m_dim must be positive");
  if (c.fmt.l_i < 1 || c.fmt.l() < 2 || c.fmt.l() > 62) fail(Errc::kConfig, "l_i + l_f must lie in [2, 62]");
  if (!(c.edge_prob >= 0 && c.edge_prob <= 1)) fail(Errc::kConfig, "edge_prob outside [0, 1]");
  if (c.kappa < 16) fail(Errc::kConfig, "kappa too small");
  return c;
}

// ---------------------------------------------------------------------------
// Plant

struct AgentPlant {
  Matrix<BigInt> A;  // n_i x n_i
  Matrix<BigInt> B;  // n_i x m_i
  Vector x0;
  std::map<std::size_t, Matrix<BigInt>> K;  // j -> K_ij (m_i x n_j), j in N_i and j = i

  std::size_t states() const { return A.rows(); }
  std::size_t inputs() const { return B.cols(); }
};

/// Agents are 0-based here; agent i is participant i + 1 on the network.
struct Plant {
  sim::Topology topology;
  FixedFormat fmt;
  std::vector<AgentPlant> agents;

  std::vector<std::size_t> neighbors(std::size_t i) const {
    std::vector<std::size_t> out;
    for (auto p : topology.neighbors(static_cast<sim::ParticipantId>(i + 1))) out.push_back(p - 1);
    return out;
  }

  void validate() const {
    require(topology.agents() == agents.size(), Errc::kInvalidArgument, "plant: topology and agent count differ");
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const AgentPlant& a = agents[i];
      require(a.A.rows() == a.A.cols() && a.A.rows() >= 1, Errc::kInvalidArgument, "plant: A must be square");
      require(a.B.rows() == a.states() && a.B.cols() >= 1, Errc::kInvalidArgument, "plant: B has the wrong shape");
      require(a.x0.size() == a.states(), Errc::kInvalidArgument, "plant: x0 has the wrong length");
      auto nb = neighbors(i);
      nb.push_back(i);
      require(a.K.size() == nb.size(), Errc::kInvalidArgument, "plant: gains must cover exactly N_i and i");
      for (std::size_t j : nb) {
        auto it = a.K.find(j);
        require(it != a.K.end(), Errc::kInvalidArgument, "plant: missing gain K_ij");
        require(it->second.rows() == a.inputs() && it->second.cols() == agents[j].states(), Errc::kInvalidArgument,
                "plant: K_ij must map n_j to m_i");
      }
      auto check = [&](const Matrix<BigInt>& m) {
        for (std::size_t r = 0; r < m.rows(); ++r)
          for (std::size_t c = 0; c < m.cols(); ++c) check_fixed_range(m(r, c), fmt);
      };
      check(a.A);
      check(a.B);
      for (const auto& [j, k] : a.K) check(k);
      for (const auto& v : a.x0) check_fixed_range(v, fmt);
    }
  }
};

namespace detail {

inline Matrix<BigInt> quantize(const Eigen::MatrixXd& m, const FixedFormat& fmt) {
  Matrix<BigInt> out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = encode_fixed(m(r, c), fmt);
  return out;
}

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, RandomSource& rng) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

inline double spectral_radius(const Eigen::MatrixXd& m) {
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Discrete-time LQR gain for u = K x: K = -(R + B'PB)^{-1} B'PA, with P from
/// iterating the Riccati recursion to a fixed point.
inline Eigen::MatrixXd dlqr(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                            const Eigen::MatrixXd& R, int max_iter = 5000, double tol = 1e-10) {
  Eigen::MatrixXd P = Q;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    const Eigen::MatrixXd gain = (R + BtP * B).ldlt().solve(BtP * A);
    Eigen::MatrixXd next = Q + A.transpose() * P * (A - B * gain);
    next = 0.5 * (next + next.transpose());
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    if (change <= tol * std::max(1.0, P.cwiseAbs().maxCoeff())) break;
  }
  const Eigen::MatrixXd BtP = B.transpose() * P;
  return -(R + BtP * B).ldlt().solve(BtP * A);
}

/// Random test plant: A_i = 0.9 * (random orthogonal), B_i Gaussian, gains
/// from a global LQR whose state cost adds the graph Laplacian (so neighbour
/// blocks are nonzero), cut to the graph's sparsity. Neighbour blocks are
/// halved until the cut closed loop has spectral radius below 1.
inline Plant make_plant(const CaseConfig& cfg, RandomSource& rng) {
  Plant plant;
  plant.fmt = cfg.fmt;
  plant.topology = cfg.M == 1 ? sim::Topology(1) : sim::gen_topology(cfg.M, cfg.edge_prob, rng);
  const auto M = static_cast<Eigen::Index>(cfg.M);
  const auto n = static_cast<Eigen::Index>(cfg.n);
  const auto m = static_cast<Eigen::Index>(cfg.m_dim);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M * n, M * n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M * n, M * m);
  for (Eigen::Index i = 0; i < M; ++i) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(detail::gaussian(n, n, rng));
    A.block(i * n, i * n, n, n) = 0.9 * Eigen::MatrixXd(qr.householderQ());
    B.block(i * n, i * m, n, m) = detail::gaussian(n, m, rng) / std::sqrt(static_cast<double>(n));
  }
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(M, M);
  for (auto [a, b] : plant.topology.edges()) {
    const Eigen::Index i = a - 1, j = b - 1;
    lap(i, j) -= 1;
    lap(j, i) -= 1;
    lap(i, i) += 1;
    lap(j, j) += 1;
  }
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(M * n, M * n);
  for (Eigen::Index i = 0; i < M; ++i)
    for (Eigen::Index j = 0; j < M; ++j) Q.block(i * n, j * n, n, n) += lap(i, j) * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd K = dlqr(A, B, Q, Eigen::MatrixXd::Identity(M * m, M * m));

  double coupling = 1.0;
  Eigen::MatrixXd Kcut;
  for (int attempt = 0;; ++attempt) {
    Kcut = Eigen::MatrixXd::Zero(M * m, M * n);
    for (Eigen::Index i = 0; i < M; ++i) {
      Kcut.block(i * m, i * n, m, n) = K.block(i * m, i * n, m, n);
      for (auto j1 : plant.topology.neighbors(static_cast<sim::ParticipantId>(i + 1))) {
        const Eigen::Index j = j1 - 1;
        Kcut.block(i * m, j * n, m, n) = coupling * K.block(i * m, j * n, m, n);
      }
    }
    if (detail::spectral_radius(A + B * Kcut) < 1.0 || attempt == 30) break;
    coupling *= 0.5;
  }

  for (Eigen::Index i = 0; i < M; ++i) {
    AgentPlant ap;
    ap.A = detail::quantize(A.block(i * n, i * n, n, n), cfg.fmt);
    ap.B = detail::quantize(B.block(i * n, i * m, n, m), cfg.fmt);
    Eigen::VectorXd x0(n);
    for (Eigen::Index k = 0; k < n; ++k) x0(k) = 2.0 * rng.unit_double() - 1.0;
    ap.x0 = detail::quantize(x0, cfg.fmt).column(0);
    ap.K[static_cast<std::size_t>(i)] = detail::quantize(Kcut.block(i * m, i * n, m, n), cfg.fmt);
    for (auto j1 : plant.topology.neighbors(static_cast<sim::ParticipantId>(i + 1)))
      ap.K[j1 - 1] = detail::quantize(Kcut.block(i * m, (j1 - 1) * n, m, n), cfg.fmt);
    plant.agents.push_back(std::move(ap));
  }
  plant.validate();
  return plant;
}

// ---------------------------------------------------------------------------
// Trajectories

/// x[t][i] for t in [0, horizon], u[t][i] for t in [0, horizon); raw values.
struct Trajectory {
  std::vector<std::vector<Vector>> x;
  std::vector<std::vector<Vector>> u;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

namespace detail {

/// Rounds a 2 l_f product back to l_f bits and enforces the l-bit range.
inline Vector requantize(const Vector& raw2, const FixedFormat& fmt, std::size_t agent, std::size_t t,
                         const char* what) {
  const BigInt half = pow2(fmt.l() - 1);
  Vector out;
  for (const auto& v : raw2) {
    BigInt r = round_shift(v, fmt.l_f);
    if (r < -half || r >= half)
      fail(Errc::kOverflowGuard, std::string(what) + " leaves the l-bit range at agent " + std::to_string(agent + 1) +
                                     ", t = " + std::to_string(t));
    out.push_back(std::move(r));
  }
  return out;
}

inline void add_into(Vector& acc, const Vector& v) {
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += v[k];
}

/// x_i(t+1) from x_i(t) and the 2 l_f-scaled control sum.
inline std::pair<Vector, Vector> advance(const Plant& p, std::size_t i, std::size_t t, const Vector& x_i,
                                         const Vector& u_raw2) {
  const AgentPlant& a = p.agents[i];
  Vector u = requantize(u_raw2, p.fmt, i, t, "control input");
  Vector next = matvec(a.A, x_i);
  add_into(next, matvec(a.B, u));
  return {requantize(next, p.fmt, i, t + 1, "state"), std::move(u)};
}

}  // namespace detail

/// Fixed-point recursion without cryptography.
inline Trajectory plaintext_oracle(const Plant& p, std::size_t horizon) {
  p.validate();
  Trajectory tr;
  std::vector<Vector> x;
  for (const auto& a : p.agents) x.push_back(a.x0);
  tr.x.push_back(x);
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<Vector> next(p.agents.size()), u(p.agents.size());
    for (std::size_t i = 0; i < p.agents.size(); ++i) {
      Vector u2(p.agents[i].inputs(), BigInt(0));
      for (const auto& [j, k] : p.agents[i].K) detail::add_into(u2, matvec(k, x[j]));
      std::tie(next[i], u[i]) = detail::advance(p, i, t, x[i], u2);
    }
    x = std::move(next);
    tr.u.push_back(u);
    tr.x.push_back(x);
  }
  return tr;
}

/// Same recursion in doubles with the quantized matrices, no rounding.
inline std::vector<std::vector<std::vector<double>>> float_reference(const Plant& p, std::size_t horizon) {
  auto dec = [&](const BigInt& v) { return decode_fixed(v, p.fmt.l_f); };
  auto mul = [&](const Matrix<BigInt>& m, const std::vector<double>& v) {
    std::vector<double> y(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) y[r] += dec(m(r, c)) * v[c];
    return y;
  };
  std::vector<std::vector<std::vector<double>>> xs(1);
  for (const auto& a : p.agents) {
    std::vector<double> v;
    for (const auto& e : a.x0) v.push_back(dec(e));
    xs[0].push_back(v);
  }
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto& x = xs.back();
    std::vector<std::vector<double>> next;
    for (std::size_t i = 0; i < p.agents.size(); ++i) {
      std::vector<double> u(p.agents[i].inputs(), 0.0);
      for (const auto& [j, k] : p.agents[i].K) {
        auto y = mul(k, x[j]);
        for (std::size_t r = 0; r < u.size(); ++r) u[r] += y[r];
      }
      auto ax = mul(p.agents[i].A, x[i]);
      auto bu = mul(p.agents[i].B, u);
      for (std::size_t r = 0; r < ax.size(); ++r) ax[r] += bu[r];
      next.push_back(std::move(ax));
    }
    xs.push_back(std::move(next));
  }
  return xs;
}

// ---------------------------------------------------------------------------
// Encrypted run

struct CaseStudyResult {
  Plant plant;
  Trajectory encrypted;
  Trajectory oracle;
  sim::SimTrace trace;
  std::optional<BitBudget> budget;  // packed runs
  std::vector<std::size_t> contribution_ciphertexts;  // per agent, toward each neighbour

  bool exact() const { return encrypted == oracle; }
};

/// Runs the plant with every neighbour term aggregated under encryption. The
/// own term K_ii x_i is added in the clear by agent i after aggregation.
/// Offline work (key generation, gain encryption, dealt masks) is booked
/// under phase "offline"; share generation and aggregation under "online".
inline CaseStudyResult run_encrypted(const Plant& plant, const CaseConfig& cfg, RandomSource& rng) {
  plant.validate();
  const std::size_t M = plant.agents.size();
  const bool packed = cfg.scheme == SchemeId::kPwsahPacked;
  require(packed || cfg.scheme == SchemeId::kPwsah, Errc::kConfig, "case study runs pwsah or pwsah* only");

  sim::Network net(plant.topology);
  CaseStudyResult res;
  res.plant = plant;

  std::size_t max_deg = 1, max_n = 1, max_m = 1;
  for (std::size_t i = 0; i < M; ++i) {
    max_deg = std::max(max_deg, plant.neighbors(i).size());
    max_n = std::max(max_n, plant.agents[i].states());
    max_m = std::max(max_m, plant.agents[i].inputs());
  }

  // One scheme instance per aggregating agent.
  std::vector<std::unique_ptr<schemes::Scheme>> scheme(M);
  std::vector<std::vector<std::size_t>> nbrs(M);
  net.set_phase("offline");
  for (std::size_t i = 0; i < M; ++i) {
    nbrs[i] = plant.neighbors(i);
    if (nbrs[i].empty()) continue;
    schemes::SchemeConfig sc;
    sc.fmt = plant.fmt;
    sc.kappa = cfg.kappa;
    sc.lambda = cfg.lambda;
    sc.horizon = cfg.share_mode == ShareMode::kDealer ? cfg.horizon : 0;
    sc.masks = schemes::SchemeConfig::Masks::kStatistical;
    std::shared_ptr<const paillier::KeyPair> keys;
    RandomSource key_rng = rng.fork(0x4B000000 + i);
    net.run_local(static_cast<sim::ParticipantId>(i + 1),
                  [&] { keys = std::make_shared<paillier::KeyPair>(paillier::KeyPair::generate(cfg.kappa, key_rng)); });
    sc.keys = keys;
    if (packed) {
      // Shared across agents so decentralized pieces use one ring.
      sc.budget = bit_budget(plant.fmt.l(), cfg.lambda, max_n, max_deg, keys->public_key().plaintext_bits());
      res.budget = sc.budget;
    }
    schemes::Weights w;
    for (std::size_t j : nbrs[i]) w.push_back(plant.agents[i].K.at(j));
    scheme[i] = schemes::make_scheme(cfg.scheme);
    net.run_local(sim::kAggregator, [&] {
      scheme[i]->setup(schemes::Dims::of(w), sc, rng);
      scheme[i]->init_weights(w, rng);
    });
  }
  res.contribution_ciphertexts.assign(M, 0);
  for (std::size_t i = 0; i < M; ++i)
    res.contribution_ciphertexts[i] =
        packed && res.budget ? ceil_div(plant.agents[i].inputs(), res.budget->m) : plant.agents[i].inputs();

  std::optional<shares::PairwiseKeys> pair_keys;
  std::optional<shares::ShareRing> ring;
  std::vector<shares::ShareGroup> groups;
  std::vector<std::size_t> group_owner;
  if (cfg.share_mode != ShareMode::kDealer) {
    net.run_local(sim::kAggregator, [&] { pair_keys = shares::PairwiseKeys::provision(M + 1, rng); });
    for (std::size_t i = 0; i < M; ++i) {
      if (nbrs[i].empty()) continue;
      require(plant.agents[i].inputs() == max_m, Errc::kInvalidArgument,
              "decentralized shares need equal input dimensions");
      shares::ShareGroup g;
      g.aggregator = static_cast<sim::ParticipantId>(i + 1);
      for (std::size_t j : nbrs[i]) g.contributors.push_back(static_cast<sim::ParticipantId>(j + 1));
      groups.push_back(std::move(g));
      group_owner.push_back(i);
    }
    ring = packed ? shares::ShareRing::mod(pow2(res.budget->gamma), max_m)
                  : shares::ShareRing::statistical(2 * plant.fmt.l() + cfg.lambda, max_m);
  }

  std::vector<Vector> x;
  for (const auto& a : plant.agents) x.push_back(a.x0);
  res.encrypted.x.push_back(x);
  net.set_phase("online");
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    if (!groups.empty()) {
      shares::ProtocolReport rep =
          cfg.share_mode == ShareMode::kOneRound
              ? shares::one_round_decentralized(net, groups, *ring, t, *pair_keys, rng)
              : shares::two_round_relay(net, groups, *ring, t, *pair_keys, rng);
      for (std::size_t g = 0; g < groups.size(); ++g) {
        schemes::StepShares s;
        s.agent = std::move(rep.groups[g].contributor_masks);
        s.aggregator = std::move(rep.groups[g].aggregator_mask);
        scheme[group_owner[g]]->provision(t, std::move(s));
      }
    }

    std::vector<schemes::Session> sessions;
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < M; ++i) {
      if (nbrs[i].empty()) continue;
      schemes::Session s;
      s.scheme = scheme[i].get();
      s.aggregator = static_cast<sim::ParticipantId>(i + 1);
      for (std::size_t j : nbrs[i]) {
        s.contributors.push_back(static_cast<sim::ParticipantId>(j + 1));
        s.inputs.push_back(x[j]);
      }
      sessions.push_back(std::move(s));
      owner.push_back(i);
    }
    if (!sessions.empty()) schemes::run_sessions(net, sessions, t, rng);

    std::vector<Vector> u2(M);
    for (std::size_t i = 0; i < M; ++i) u2[i] = matvec(plant.agents[i].K.at(i), x[i]);
    for (std::size_t s = 0; s < sessions.size(); ++s) detail::add_into(u2[owner[s]], sessions[s].result);

    std::vector<Vector> next(M), u(M);
    for (std::size_t i = 0; i < M; ++i) std::tie(next[i], u[i]) = detail::advance(plant, i, t, x[i], u2[i]);
    x = std::move(next);
    res.encrypted.u.push_back(u);
    res.encrypted.x.push_back(x);
  }
  res.trace = net.trace();
  res.oracle = plaintext_oracle(plant, cfg.horizon);
  return res;
}

/// Plant from the seed, then the encrypted run and the oracle.
inline CaseStudyResult run_case_study(const CaseConfig& cfg) {
  RandomSource rng = RandomSource::deterministic(cfg.seed);
  RandomSource plant_rng = rng.fork(1);
  RandomSource run_rng = rng.fork(2);
  return run_encrypted(make_plant(cfg, plant_rng), cfg, run_rng);
}

/// Columns: t, agent (1-based), component (x<k> or u<k>), encrypted_raw,
/// oracle_raw.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& enc, const Trajectory& orc) {
  os << "t,agent,component,encrypted_raw,oracle_raw\n";
  auto rows = [&](const std::vector<std::vector<Vector>>& a, const std::vector<std::vector<Vector>>& b, char tag) {
    for (std::size_t t = 0; t < a.size(); ++t)
      for (std::size_t i = 0; i < a[t].size(); ++i)
        for (std::size_t k = 0; k < a[t][i].size(); ++k) {
          os << t << ',' << i + 1 << ',' << tag << k << ',' << a[t][i][k] << ',';
          if (t < b.size() && i < b[t].size() && k < b[t][i].size()) os << b[t][i][k];
          os << '\n';
        }
  };
  rows(enc.x, orc.x, 'x');
  rows(enc.u, orc.u, 'u');
}

}  // namespace privagg::control
