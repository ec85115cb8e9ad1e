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

#include "privagg/zeroshares.hpp"

#include <map>
#include <set>

#include "gtest/gtest.h"
#include "test_keys.hpp"

namespace privagg::shares {
namespace {

using sim::Network;
using sim::Topology;

ShareGroup star_group(std::size_t M) {
  ShareGroup g;
  for (sim::ParticipantId i = 1; i <= M; ++i) g.contributors.push_back(i);
  return g;
}

TEST(DealerSharesTest, SingleAgentIsNegated) {
  auto rng = RandomSource::deterministic(1);
  ZeroShareSet s = dealer_share_set(1, ShareRange::statistical(2, 4), 0, rng);
  EXPECT_EQ(s.aggregator_share, -s.agent_shares[0]);
}

TEST(DealerSharesTest, ModQExample) {
  ZeroShareSet s = complete_shares(0, {100, 50, 30}, ShareRange::mod_q(256));
  EXPECT_EQ(s.aggregator_share, 76);
  EXPECT_TRUE(s.zero_sum());
}

TEST(DealerSharesTest, StatisticalRangeAndExactSum) {
  auto rng = RandomSource::deterministic(2);
  for (const auto& s : dealer_shares(5, ShareRange::statistical(2, 4), 0, 200, rng)) {
    EXPECT_TRUE(s.in_range());
    for (const auto& v : s.agent_shares) {
      EXPECT_GT(v, 0);
      EXPECT_LT(v, 256);
    }
    BigInt sum = 0;
    for (const auto& v : s.agent_shares) sum += v;
    EXPECT_EQ(s.aggregator_share, -sum);
  }
}

TEST(DealerSharesTest, FreshSetsPerStep) {
  auto rng = RandomSource::deterministic(3);
  auto sets = dealer_shares(4, ShareRange::mod_q(pow2(128)), 0, 50, rng);
  for (std::size_t a = 0; a < sets.size(); ++a) {
    EXPECT_EQ(sets[a].t, a);
    for (std::size_t b = a + 1; b < sets.size(); ++b) EXPECT_NE(sets[a].agent_shares, sets[b].agent_shares);
  }
}

TEST(DealerSharesTest, UnitSharesAreUnits) {
  auto rng = RandomSource::deterministic(4);
  for (const auto& s : dealer_shares(3, ShareRange::mod_q(35, true), 0, 300, rng))
    for (const auto& v : s.agent_shares) EXPECT_TRUE(is_unit(v, 35));
}

TEST(WeightedSharesTest, Example) {
  EXPECT_EQ(weighted_aggregator_share({2, 3}, {5, 7}), -31);
  EXPECT_EQ(weighted_aggregator_share({1}, {9}), -9);
}

TEST(WeightedSharesTest, ExponentsCancel) {
  // 2^{-31} * (2^5)^2 * (2^7)^3 = 1 mod 1225
  BigInt prod = mod_pow_signed(2, -31, 1225);
  prod = prod * mod_pow_signed(mod_pow_signed(2, 5, 1225), 2, 1225) % 1225;
  prod = prod * mod_pow_signed(mod_pow_signed(2, 7, 1225), 3, 1225) % 1225;
  EXPECT_EQ(prod, 1);
  auto rng = RandomSource::deterministic(5);
  WeightedShareSet ws = dealer_weighted_shares({2, 3, 34}, 35, rng);
  EXPECT_TRUE(ws.zero_sum());
  for (const auto& s : ws.agent_shares) EXPECT_TRUE(is_unit(s, 1225));
}

TEST(AssistedShareTest, ToyMatchesDealerOracle) {
  auto rng = RandomSource::deterministic(6);
  paillier::KeyPair helper = paillier::KeyPair::generate(64, rng);
  EXPECT_EQ(dealer_assisted_weighted(helper, {2, 3}, {5, 7}, 2, 35, rng), -31);
  EXPECT_EQ(dealer_assisted_weighted(helper, {1}, {5}, 1, 35, rng), -5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BigInt> w = {rng.below(16), rng.below(16), rng.below(16)};
    WeightedShareSet ws = dealer_weighted_shares(w, 35, rng);
    EXPECT_EQ(dealer_assisted_weighted(helper, w, ws.agent_shares, 4, 35, rng), ws.aggregator_share);
  }
}

TEST(AssistedShareTest, UndersizedHelperDetected) {
  auto rng = RandomSource::deterministic(7);
  // Bound M * 2^l * N^2 = 2 * 4 * 1225 = 9800; a 14-bit helper holds < 16384 < 2 * 9800.
  BigInt bound = assisted_share_bound(2, 2, 35);
  EXPECT_EQ(bound, 9800);
  paillier::KeyPair small = paillier::KeyPair::generate(14, rng);
  ASSERT_LT(small.public_key().n(), 2 * bound);
  try {
    dealer_assisted_weighted(small, {2, 3}, {5, 7}, 2, 35, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kWrapDetected);
  }
}

TEST(GcdRepairTest, Example) {
  EXPECT_EQ(gcd(BigInt(14), BigInt(35)), 7);
  RepairResult r = gcd_repair(14, 35, 3, 10);
  EXPECT_EQ(r.mask, 16);
  EXPECT_EQ(r.shift, 2);
  EXPECT_TRUE(is_unit(r.mask, 35));
  EXPECT_EQ(mod(r.sigma_self + r.sigma_aggregator, 35), 13);
}

TEST(GcdRepairTest, UnitUnchanged) {
  RepairResult r = gcd_repair(12, 35, 3, 10);
  EXPECT_EQ(r.shift, 0);
  EXPECT_EQ(r.sigma_self, 3);
  EXPECT_EQ(r.sigma_aggregator, 10);
}

TEST(GcdRepairTest, ExhaustiveToyModulus) {
  for (long s = 0; s < 35; ++s)
    for (long a = 0; a < 35; ++a) {
      RepairResult r = gcd_repair(s, 35, a, 0);
      ASSERT_TRUE(is_unit(r.mask, 35));
      ASSERT_EQ(mod(r.sigma_self + r.sigma_aggregator, 35), a);
      ASSERT_EQ(mod(BigInt(s) - a + r.sigma_self, 35), r.mask);
    }
}

TEST(EnvelopeTest, WireLayoutAndRoundTrip) {
  auto rng = RandomSource::deterministic(8);
  PairwiseKeys keys = PairwiseKeys::provision(4, rng);
  ShareRing ring = ShareRing::mod(35);
  ShareEnvelope e = seal_share(keys, 2, 3, 77, 0, ring, {29}, rng);
  Bytes wire = e.serialize();
  ASSERT_EQ(wire.size(), ring.envelope_bytes());
  EXPECT_EQ(wire.size(), 4u + 4 + 8 + 12 + 1 + 16);
  EXPECT_EQ(read_be(std::span<const std::uint8_t>(wire).subspan(0, 4)), 2u);
  EXPECT_EQ(read_be(std::span<const std::uint8_t>(wire).subspan(4, 4)), 3u);
  EXPECT_EQ(read_be(std::span<const std::uint8_t>(wire).subspan(8, 8)), 77u);
  EXPECT_EQ(open_share(keys, ShareEnvelope::parse(wire), 0, ring), (std::vector<BigInt>{29}));
}

TEST(EnvelopeTest, TamperingFailsAuthentication) {
  auto rng = RandomSource::deterministic(9);
  PairwiseKeys keys = PairwiseKeys::provision(3, rng);
  ShareRing ring = ShareRing::mod(pow2(64), 3);
  Bytes wire = seal_share(keys, 1, 2, 5, 0, ring, {1, 2, 3}, rng).serialize();
  Bytes flipped = wire;
  flipped.back() ^= 1;
  auto code_of = [&](const Bytes& w, std::size_t group) {
    try {
      open_share(keys, ShareEnvelope::parse(w), group, ring);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kConfig;
  };
  EXPECT_EQ(code_of(flipped, 0), Errc::kAuthenticationFailure);
  EXPECT_EQ(code_of(wire, 1), Errc::kAuthenticationFailure);
  Bytes rerouted = wire;
  rerouted[7] = 0;  // recipient 2 -> 0 changes the key and the header
  EXPECT_EQ(code_of(rerouted, 0), Errc::kAuthenticationFailure);
}

TEST(EnvelopeTest, AesBatchCountsForEvaluationSetting) {
  // gamma * n_a = 74 * 6 bits packed; (2l + lambda) * n_a = 144 * 6 naive.
  ShareRing packed = ShareRing::mod(pow2(74), 6);
  ShareRing naive = ShareRing::statistical(144, 6);
  EXPECT_EQ(packed.body_bytes(), 56u);
  EXPECT_EQ(naive.body_bytes(), 108u);
  EXPECT_EQ((packed.body_bytes() + 15) / 16, 4u);
  EXPECT_EQ((naive.body_bytes() + 15) / 16, 7u);
}

TEST(OneRoundTest, CompleteGraphThresholdThree) {
  auto rng = RandomSource::deterministic(10);
  PairwiseKeys keys = PairwiseKeys::provision(4, rng);
  Network net(Topology::complete(3));
  ShareRing ring = ShareRing::mod(35);
  ProtocolReport r = one_round_decentralized(net, {star_group(3)}, ring, 0, keys, rng);
  EXPECT_TRUE(r.groups[0].zero_sum(ring));
  EXPECT_EQ(r.collusion_threshold, 3u);
  EXPECT_EQ(r.rounds, 2u);
  EXPECT_EQ(net.trace().messages.size(), 12u);
}

TEST(OneRoundTest, StarGraphThresholdOne) {
  auto rng = RandomSource::deterministic(11);
  PairwiseKeys keys = PairwiseKeys::provision(5, rng);
  Network net(Topology::star(4));
  ShareRing ring = ShareRing::mod(35);
  ProtocolReport r = one_round_decentralized(net, {star_group(4)}, ring, 0, keys, rng);
  EXPECT_EQ(r.collusion_threshold, 1u);
  EXPECT_TRUE(r.groups[0].zero_sum(ring));
}

TEST(OneRoundTest, SingleEdgeMasksAreOpposite) {
  auto rng = RandomSource::deterministic(19);
  PairwiseKeys keys = PairwiseKeys::provision(2, rng);
  Network net(Topology::star(1));
  ProtocolReport r = one_round_decentralized(net, {star_group(1)}, ShareRing::mod(35), 0, keys, rng);
  const auto& g = r.groups[0];
  EXPECT_EQ(mod(g.contributor_masks[0][0] + g.aggregator_mask[0], 35), 0);
  EXPECT_EQ(r.collusion_threshold, 1u);
}

TEST(OneRoundTest, StarThresholdIsMinDegree) {
  auto rng = RandomSource::deterministic(12);
  PairwiseKeys keys = PairwiseKeys::provision(5, rng);
  Topology t(4);
  t.add_edge(1, 2);
  t.add_edge(2, 3);
  t.add_edge(3, 4);
  t.add_edge(4, 1);
  t.add_edge(1, 3);
  Network net(t);
  ShareRing ring = ShareRing::mod(pow2(16), 2);
  ProtocolReport r = one_round_decentralized(net, {star_group(4)}, ring, 0, keys, rng);
  EXPECT_TRUE(r.groups[0].zero_sum(ring));
  EXPECT_EQ(r.collusion_threshold, 3u);  // agents 2 and 4: two agent edges plus the aggregator
}

TEST(OneRoundTest, StatisticalRingSumsOverIntegers) {
  auto rng = RandomSource::deterministic(14);
  PairwiseKeys keys = PairwiseKeys::provision(6, rng);
  Network net(Topology::complete(5));
  ShareRing ring = ShareRing::statistical(20, 3);
  ProtocolReport r = one_round_decentralized(net, {star_group(5)}, ring, 0, keys, rng);
  EXPECT_TRUE(r.groups[0].zero_sum(ring));
}

TEST(TwoRoundTest, TwoAgentsSumToZero) {
  auto rng = RandomSource::deterministic(15);
  PairwiseKeys keys = PairwiseKeys::provision(3, rng);
  Network net(Topology::complete(2));
  ShareRing ring = ShareRing::mod(35, 1, true);
  ProtocolReport r = two_round_relay(net, {star_group(2)}, ring, 9, keys, rng);
  EXPECT_TRUE(r.groups[0].zero_sum(ring));
  EXPECT_EQ(r.collusion_threshold, 1u);
  for (const auto& m : r.groups[0].contributor_masks) EXPECT_TRUE(is_unit(m[0], 35));
}

TEST(TwoRoundTest, CompleteGraphNeedsNoRelay) {
  auto rng = RandomSource::deterministic(16);
  PairwiseKeys keys = PairwiseKeys::provision(6, rng);
  Network net(Topology::complete(5));
  ProtocolReport r = two_round_relay(net, {star_group(5)}, ShareRing::mod(pow2(64)), 1, keys, rng);
  EXPECT_EQ(net.trace().count_of_kind("relay/0"), 0u);
  EXPECT_EQ(net.trace().count_of_kind("batch/0"), 0u);
  EXPECT_EQ(r.collusion_threshold, 4u);
}

TEST(TwoRoundTest, PathGraphRelaysNonNeighbours) {
  auto rng = RandomSource::deterministic(17);
  PairwiseKeys keys = PairwiseKeys::provision(5, rng);
  Network net(Topology::path(4));
  ShareRing ring = ShareRing::mod(pow2(64));
  ProtocolReport r = two_round_relay(net, {star_group(4)}, ring, 3, keys, rng);
  EXPECT_TRUE(r.groups[0].zero_sum(ring));
  // Non-adjacent ordered pairs on a 4-path: (1,3) (1,4) (2,4) both ways.
  const auto& tr = net.trace();
  EXPECT_EQ(tr.count_of_kind("relay/0"), 6u);
  EXPECT_EQ(tr.bytes_of_kind("relay/0"), 6 * ring.envelope_bytes());
  EXPECT_EQ(tr.bytes_of_kind("batch/0"), 6 * ring.envelope_bytes());
  EXPECT_EQ(tr.count_of_kind("batch/0"), 4u);  // one per recipient
  for (const auto& m : tr.messages) {
    if (m.kind == "share/0" && m.sender != 0 && m.recipient != 0) {
      EXPECT_TRUE(net.topology().has_edge(m.sender, m.recipient));
    }
  }
  EXPECT_LE(r.last_send_round, 3u);
}

TEST(TwoRoundTest, ExhaustiveUnitsAfterRepairAtToyModulus) {
  // Every residue pattern shows up across many runs at N = 35.
  std::size_t repairs = 0;
  std::set<long> seen_before_repair;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto rng = RandomSource::deterministic(1000 + seed);
    PairwiseKeys keys = PairwiseKeys::provision(5, rng);
    Network net(Topology::path(4));
    ShareRing ring = ShareRing::mod(35, 1, true);
    ProtocolReport r = two_round_relay(net, {star_group(4)}, ring, seed, keys, rng);
    ASSERT_TRUE(r.groups[0].zero_sum(ring));
    for (const auto& m : r.groups[0].contributor_masks) ASSERT_TRUE(is_unit(m[0], 35));
    EXPECT_LE(r.last_send_round, 3u);
    repairs += r.repairs;
  }
  EXPECT_GT(repairs, 0u);
}

TEST(TwoRoundTest, MultipleGroupsShareTheNetwork) {
  auto rng = RandomSource::deterministic(18);
  Topology t = Topology::path(4);
  t.add_edge(1, 3);
  PairwiseKeys keys = PairwiseKeys::provision(5, rng);
  Network net(t);
  // Agent 3 aggregates its neighbours 1, 2, 4; agent 2 aggregates 1 and 3.
  std::vector<ShareGroup> groups = {{3, {1, 2, 4}}, {2, {1, 3}}};
  ShareRing ring = ShareRing::mod(pow2(20), 2);
  ProtocolReport r = two_round_relay(net, groups, ring, 0, keys, rng);
  EXPECT_TRUE(r.groups[0].zero_sum(ring));
  EXPECT_TRUE(r.groups[1].zero_sum(ring));
  EXPECT_EQ(net.trace().count_of_kind("relay/0"), 4u);  // 1 <-> 4 and 2 <-> 4 via 3
  EXPECT_EQ(net.trace().count_of_kind("relay/1"), 0u);
}

// Exact distributions at toy scale.

TEST(MaskingDistributionTest, ModQIsExactlyUniform) {
  const long q = 16;
  for (long m = 0; m < q; ++m) {
    std::vector<long> hist(q, 0);
    for (long s = 0; s < q; ++s) ++hist[(m + s) % q];
    for (long h : hist) ASSERT_EQ(h, 1);
  }
}

TEST(MaskingDistributionTest, StatisticalDistanceWithinBound) {
  // m in [0, 2^l), s uniform in (0, 2^{l+lambda}); compare m + s with s.
  const long l = 3, lambda = 4;
  const long range = (1L << (l + lambda)) - 1;  // support size of s
  for (long m = 0; m < (1L << l); ++m) {
    std::map<long, long> p, u;
    for (long s = 1; s <= range; ++s) {
      ++p[m + s];
      ++u[s];
    }
    long diff = 0;
    std::set<long> keys;
    for (auto& [k, v] : p) keys.insert(k);
    for (auto& [k, v] : u) keys.insert(k);
    for (long k : keys) diff += std::labs(p[k] - u[k]);
    // distance = diff / (2 * range) <= 2^-lambda
    EXPECT_LE(diff * (1L << lambda), 2 * range) << "m=" << m;
  }
}

}  // namespace
}  // namespace privagg::shares
