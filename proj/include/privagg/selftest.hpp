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

// Hand-checkable values at toy moduli, run by `privagg selftest`.

#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "privagg/control.hpp"
#include "privagg/scheme_run.hpp"

namespace privagg::selftest {

struct Check {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// Golden scheme runs at N = 35 (p = 5, q = 7) unless noted.
struct Golden {
  const char* name;
  const char* config;
  schemes::Vector expect;
};

inline const std::vector<Golden>& goldens() {
  static const std::vector<Golden> g{
      {"psa1", R"(scheme = psa1
l_i = 4
l_f = 0
modulus_q = 256
check_capacity = false
agents = 3
rows = 1
cols = 1
weights = 2, 1, 1
inputs = 3, 4, 5
shares = 100, 50, 30
aggregator_share = 76
)",
       {15}},
      {"psa2", R"(scheme = psa2
p = 5
q = 7
l_i = 4
l_f = 0
hash_stub = 2
check_capacity = false
agents = 2
rows = 1
cols = 1
weights = 1, 1
inputs = 2, 3
shares = 3, 4
aggregator_share = -7
)",
       {5}},
      {"pwsac", R"(scheme = pwsac
p = 5
q = 7
l_i = 4
l_f = 0
hash_stub = 2
check_capacity = false
agents = 2
rows = 1
cols = 1
weights = 2, 3
inputs = 1, 2
shares = 5, 7
aggregator_share = -31
)",
       {8}},
      {"pwsah", R"(scheme = pwsah
p = 5
q = 7
l_i = 4
l_f = 0
check_capacity = false
agents = 1
rows = 1
cols = 1
weights = 3
inputs = 4
shares = 2
aggregator_share = -2
)",
       {12}},
      // 64-bit key: a 17-bit slot needs more than N = 35.
      {"pwsah*", R"(scheme = pwsah*
kappa = 64
seed = 18
l_i = 4
l_f = 0
lambda = 4
budget = 6, 17, 3
check_capacity = false
agents = 1
rows = 2
cols = 2
weights = 1, -1, 2, 0
inputs = 3, 1
)",
       {2, 6}},
  };
  return g;
}

inline std::vector<Check> run_all() {
  std::vector<Check> out;
  auto guard = [&](const std::string& name, const std::function<std::string()>& fn) {
    try {
      std::string detail = fn();
      out.push_back({name, detail.empty(), detail});
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  };

  const paillier::KeyPair toy(BigModulus{35, 6, PrimeFactors{5, 7}});
  const auto& pk = toy.public_key();
  guard("paillier E(2; r=1) = 71, D(71) = 2", [&]() -> std::string {
    if (pk.encrypt(2, 1).value != 71) return "E(2; 1) = " + pk.encrypt(2, 1).value.get_str();
    if (toy.decrypt({71, pk.fingerprint()}) != 2) return "D(71) != 2";
    return {};
  });
  guard("paillier roundtrip over Z/35 and every unit r", [&]() -> std::string {
    for (long m = 0; m < 35; ++m)
      for (long r = 1; r < 35; ++r)
        if (is_unit(r, 35) && toy.decrypt(pk.encrypt(m, r)) != m)
          return "m = " + std::to_string(m) + ", r = " + std::to_string(r);
    return {};
  });
  guard("budget l=32 lambda=80 n=6 M=50 bits=2048", []() -> std::string {
    const BitBudget b = bit_budget(32, 80, 6, 50, 2048);
    if (b != BitBudget{74, 198, 10}) return "got " + std::to_string(b.gamma) + "," + std::to_string(b.delta);
    return {};
  });
  for (const auto& g : goldens())
    guard(std::string("golden ") + g.name, [&]() -> std::string {
      auto spec = schemes::parse_scheme_run(config::KeyValues::parse(std::string(g.config)));
      auto r = schemes::execute(spec);
      if (r.aggregate != g.expect) return "aggregate mismatch";
      if (!r.matches()) return "oracle mismatch";
      return {};
    });
  guard("relay on a path at N = 35: zero-sum, unit masks", []() -> std::string {
    auto rng = RandomSource::deterministic(35);
    auto keys = shares::PairwiseKeys::provision(5, rng);
    const auto ring = shares::ShareRing::mod(35, 1, true);
    for (std::uint64_t t = 0; t < 50; ++t) {
      sim::Network net(sim::Topology::path(4));
      auto rep = shares::two_round_relay(net, {{sim::kAggregator, {1, 2, 3, 4}}}, ring, t, keys, rng);
      if (!rep.groups[0].zero_sum(ring)) return "sum not zero at t = " + std::to_string(t);
      for (const auto& m : rep.groups[0].contributor_masks)
        if (!is_unit(m[0], 35)) return "non-unit mask at t = " + std::to_string(t);
      if (rep.last_send_round > 3) return "protocol sent after round 3";
    }
    return {};
  });
  guard("case study: scalar chain encrypted == oracle", []() -> std::string {
    control::Plant p;
    p.fmt = {16, 16};
    p.topology = sim::Topology::path(3);
    for (std::size_t i = 0; i < 3; ++i) {
      control::AgentPlant a;
      a.A = Matrix<BigInt>{{encode_fixed(0.9, p.fmt)}};
      a.B = Matrix<BigInt>{{encode_fixed(1.0, p.fmt)}};
      a.x0 = {encode_fixed(1.0 - static_cast<double>(i), p.fmt)};
      for (std::size_t j = 0; j < 3; ++j)
        if (j == i || j + 1 == i || i + 1 == j) a.K[j] = Matrix<BigInt>{{encode_fixed(j == i ? -0.4 : -0.2, p.fmt)}};
      p.agents.push_back(std::move(a));
    }
    control::CaseConfig cfg;
    cfg.kappa = 256;
    cfg.horizon = 5;
    auto rng = RandomSource::deterministic(3);
    return control::run_encrypted(p, cfg, rng).exact() ? std::string() : std::string("trajectories differ");
  });
  return out;
}

}  // namespace privagg::selftest
