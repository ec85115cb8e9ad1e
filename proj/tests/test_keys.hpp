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

// Shared key fixtures. Larger keys are generated once per process from fixed
// seeds.

#pragma once

#include <map>

#include "privagg/paillier.hpp"

namespace privagg::testing_keys {

inline paillier::KeyPair toy_keypair() { return paillier::KeyPair(BigModulus{35, 6, PrimeFactors{5, 7}}); }

inline const paillier::KeyPair& keypair_of_bits(std::size_t kappa, std::uint64_t salt = 0) {
  static std::map<std::pair<std::size_t, std::uint64_t>, paillier::KeyPair> cache;
  auto key = std::make_pair(kappa, salt);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto rng = RandomSource::deterministic(0x5EED0000 + kappa * 131 + salt);
    it = cache.emplace(key, paillier::KeyPair::generate(kappa, rng)).first;
  }
  return it->second;
}

inline const paillier::KeyPair& keypair_2048() { return keypair_of_bits(2048); }

}  // namespace privagg::testing_keys
