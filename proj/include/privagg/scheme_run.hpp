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

// One scheme instance described by a `key = value` file.
//
//   scheme          psa1 | psa2 | pwsac | pwsah | pwsah*
//   p, q            key primes (otherwise kappa + seed generate a key)
//   agents, rows    M and n_a
//   cols            n_i, one value for all agents or one per agent
//   weights         raw fixed-point entries, agent-major then row-major
//   inputs          raw fixed-point entries, agent-major
//   shares          optional agent masks for step t, agent-major
//   aggregator_share  optional aggregator mask, one per component
//   l_i, l_f, lambda, kappa, seed, t, modulus_q, hash_stub,
//   budget (gamma,delta,m), pack, masks (auto|units|statistical),
//   check_capacity (true|false)

#pragma once

#include <memory>
#include <optional>
#include <string>

#include "privagg/config.hpp"
#include "privagg/schemes.hpp"

namespace privagg::schemes {

struct SchemeRunSpec {
  SchemeId scheme = SchemeId::kPwsah;
  SchemeConfig cfg;
  Weights w;
  Inputs x;
  std::uint64_t t = 0;
  std::uint64_t seed = 1;
  std::optional<StepShares> shares;
};

namespace detail {

inline bool parse_bool(const config::KeyValues& kv, const std::string& key) {
  const std::string& v = kv.text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(Errc::kConfig, "key '" + key + "': expected true or false");
}

}  // namespace detail

inline SchemeRunSpec parse_scheme_run(const config::KeyValues& kv, std::optional<SchemeId> scheme = std::nullopt) {
  kv.restrict_to({"scheme", "p", "q", "agents", "rows", "cols", "weights", "inputs", "shares", "aggregator_share", "l_i",
                  "l_f", "lambda", "kappa", "seed", "t", "modulus_q", "hash_stub", "budget", "pack", "masks",
                  "check_capacity"});
  SchemeRunSpec s;
  if (scheme) {
    s.scheme = *scheme;
  } else {
    try {
      s.scheme = parse_scheme(kv.text("scheme"));
    } catch (const Error& e) {
      if (e.code() == Errc::kConfig) throw;
      fail(Errc::kConfig, "unknown scheme '" + kv.text("scheme") + "'");
    }
  }
  SchemeConfig& c = s.cfg;
  c.fmt.l_i = kv.number_or<unsigned>("l_i", c.fmt.l_i);
  c.fmt.l_f = kv.number_or<unsigned>("l_f", c.fmt.l_f);
  if (c.fmt.l() < 2 || c.fmt.l() > 62) fail(Errc::kConfig, "l_i + l_f must lie in [2, 62]");
  c.lambda = kv.number_or<unsigned>("lambda", c.lambda);
  c.kappa = kv.number_or<std::size_t>("kappa", c.kappa);
  s.seed = kv.number_or<std::uint64_t>("seed", s.seed);
  s.t = kv.number_or<std::uint64_t>("t", s.t);
  c.horizon = s.t + 1;
  if (kv.has("modulus_q")) c.modulus_q = kv.big("modulus_q");
  if (kv.has("hash_stub")) c.hash_stub = kv.big("hash_stub");
  if (kv.has("pack")) c.pack = detail::parse_bool(kv, "pack");
  if (kv.has("check_capacity")) c.check_capacity = detail::parse_bool(kv, "check_capacity");
  if (kv.has("masks")) {
    const std::string& m = kv.text("masks");
    if (m == "auto") c.masks = SchemeConfig::Masks::kAuto;
    else if (m == "units") c.masks = SchemeConfig::Masks::kUnits;
    else if (m == "statistical") c.masks = SchemeConfig::Masks::kStatistical;
    else fail(Errc::kConfig, "masks must be auto, units or statistical");
  }
  if (kv.has("budget")) {
    auto b = kv.big_list("budget");
    if (b.size() != 3) fail(Errc::kConfig, "budget takes gamma,delta,m");
    c.budget = BitBudget{static_cast<unsigned>(b[0].get_ui()), static_cast<unsigned>(b[1].get_ui()),
                         static_cast<std::size_t>(b[2].get_ui())};
  }
  if (kv.has("p") != kv.has("q")) fail(Errc::kConfig, "give both p and q");
  if (kv.has("p")) {
    BigInt p = kv.big("p"), q = kv.big("q");
    auto rng = RandomSource::deterministic(s.seed);
    if (check_prime_pair(p, q, 0, rng) != PairVerdict::kAccepted) fail(Errc::kConfig, "p and q are not a valid pair");
    if (p > q) std::swap(p, q);
    c.keys = std::make_shared<const paillier::KeyPair>(
        BigModulus{p * q, static_cast<std::size_t>(bit_length(p * q)), PrimeFactors{p, q}});
    c.kappa = bit_length(p * q);
  }

  const auto M = kv.number<std::size_t>("agents");
  const auto rows = kv.number<std::size_t>("rows");
  if (M == 0 || rows == 0) fail(Errc::kConfig, "agents and rows must be positive");
  auto cols_list = kv.big_list("cols");
  std::vector<std::size_t> cols;
  for (const auto& v : cols_list) cols.push_back(v.get_ui());
  if (cols.size() == 1) cols.assign(M, cols[0]);
  if (cols.size() != M) fail(Errc::kConfig, "cols takes one value or one per agent");
  for (auto v : cols)
    if (v == 0) fail(Errc::kConfig, "cols must be positive");

  const auto w = kv.big_list("weights");
  const auto x = kv.big_list("inputs");
  std::size_t need_w = 0, need_x = 0;
  for (auto v : cols) {
    need_w += rows * v;
    need_x += v;
  }
  if (w.size() != need_w) fail(Errc::kConfig, "weights: expected " + std::to_string(need_w) + " entries");
  if (x.size() != need_x) fail(Errc::kConfig, "inputs: expected " + std::to_string(need_x) + " entries");
  std::size_t wi = 0, xi = 0;
  for (std::size_t i = 0; i < M; ++i) {
    Matrix<BigInt> m(rows, cols[i]);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t k = 0; k < cols[i]; ++k) m(r, k) = w[wi++];
    s.w.push_back(std::move(m));
    s.x.push_back(Vector(x.begin() + static_cast<std::ptrdiff_t>(xi), x.begin() + static_cast<std::ptrdiff_t>(xi + cols[i])));
    xi += cols[i];
  }

  if (kv.has("shares") != kv.has("aggregator_share")) fail(Errc::kConfig, "give both shares and aggregator_share");
  if (kv.has("shares")) {
    auto sh = kv.big_list("shares");
    if (sh.size() % M != 0) fail(Errc::kConfig, "shares: not a whole number per agent");
    const std::size_t width = sh.size() / M;
    StepShares st;
    for (std::size_t i = 0; i < M; ++i)
      st.agent.push_back(Vector(sh.begin() + static_cast<std::ptrdiff_t>(i * width),
                                sh.begin() + static_cast<std::ptrdiff_t>((i + 1) * width)));
    st.aggregator = kv.big_list("aggregator_share");
    s.shares = std::move(st);
  }
  return s;
}

/// Setup and weights offline, explicit masks if given, then one step.
inline RunResult execute(const SchemeRunSpec& spec) {
  auto rng = RandomSource::deterministic(spec.seed);
  auto scheme = make_scheme(spec.scheme);
  sim::Network net(sim::Topology::star(spec.w.size()));
  net.set_phase("offline");
  net.run_local(sim::kAggregator, [&] {
    scheme->setup(Dims::of(spec.w), spec.cfg, rng);
    scheme->init_weights(spec.w, rng);
  });
  if (spec.shares) scheme->provision(spec.t, *spec.shares);
  return run_step(*scheme, spec.w, spec.x, spec.t, rng, &net);
}

}  // namespace privagg::schemes
