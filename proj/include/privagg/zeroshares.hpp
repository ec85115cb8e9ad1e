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

// Additive shares of zero: s_1 + ... + s_M + s_a = 0, over the integers or
// modulo Q. Generated by a dealer, or among the participants themselves over
// the simulated network (one direct round, or a relayed two-round protocol
// with AES-GCM envelopes).

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "privagg/encoding.hpp"
#include "privagg/paillier.hpp"
#include "privagg/simnet.hpp"
#include "privagg/symmetric.hpp"

namespace privagg::shares {

using sim::ParticipantId;

enum class RangeKind { kModQ, kStatistical, kSlotWise };

/// Where agent shares are drawn from.
///   kModQ:        uniform in Z/QZ (units only if unit_modulus is set); s_a
///                 is the residue -sum mod Q.
///   kStatistical: uniform in (0, bound); s_a = -sum exactly.
///   kSlotWise:    uniform in [0, 2^gamma); s_a = -sum exactly. Zero is
///                 allowed so that s mod 2^gamma is an exact one-time pad.
struct ShareRange {
  RangeKind kind = RangeKind::kModQ;
  BigInt bound;
  BigInt unit_modulus = 0;  // when nonzero, agent shares are units mod this

  static ShareRange mod_q(BigInt q, bool units = false) {
    return {RangeKind::kModQ, q, units ? q : BigInt(0)};
  }
  static ShareRange statistical(unsigned l, unsigned lambda) {
    return {RangeKind::kStatistical, pow2(lambda + 2 * l), 0};
  }
  /// Integer exponent shares in (0, bound), units mod `unit_modulus`.
  static ShareRange integers(BigInt bound, BigInt unit_modulus) {
    return {RangeKind::kStatistical, std::move(bound), std::move(unit_modulus)};
  }
  static ShareRange slot_wise(unsigned gamma) { return {RangeKind::kSlotWise, pow2(gamma), 0}; }

  BigInt sample(RandomSource& rng) const {
    for (;;) {
      BigInt s = kind == RangeKind::kStatistical ? rng.between(1, bound - 1) : rng.below(bound);
      if (unit_modulus == 0 || is_unit(s, unit_modulus)) return s;
    }
  }

  BigInt aggregator_share(const BigInt& sum) const { return kind == RangeKind::kModQ ? mod(-sum, bound) : BigInt(-sum); }
};

struct ZeroShareSet {
  std::uint64_t t = 0;
  std::vector<BigInt> agent_shares;
  BigInt aggregator_share;
  ShareRange range;

  bool zero_sum() const {
    BigInt sum = aggregator_share;
    for (const auto& s : agent_shares) sum += s;
    return range.kind == RangeKind::kModQ ? mod(sum, range.bound) == 0 : sum == 0;
  }

  bool in_range() const {
    for (const auto& s : agent_shares) {
      bool ok = range.kind == RangeKind::kStatistical ? (s > 0 && s < range.bound) : (s >= 0 && s < range.bound);
      if (!ok) return false;
    }
    return true;
  }
};

/// Completes given agent shares with the aggregator's share.
inline ZeroShareSet complete_shares(std::uint64_t t, std::vector<BigInt> agent_shares, const ShareRange& range) {
  BigInt sum = 0;
  for (const auto& s : agent_shares) sum += s;
  return ZeroShareSet{t, std::move(agent_shares), range.aggregator_share(sum), range};
}

inline ZeroShareSet dealer_share_set(std::size_t M, const ShareRange& range, std::uint64_t t, RandomSource& rng) {
  require(M >= 1, Errc::kInvalidArgument, "dealer_shares: M must be at least 1");
  std::vector<BigInt> s(M);
  for (auto& v : s) v = range.sample(rng);
  return complete_shares(t, std::move(s), range);
}

/// Fresh independent sets for t in [t_begin, t_end).
inline std::vector<ZeroShareSet> dealer_shares(std::size_t M, const ShareRange& range, std::uint64_t t_begin,
                                               std::uint64_t t_end, RandomSource& rng) {
  std::vector<ZeroShareSet> out;
  for (std::uint64_t t = t_begin; t < t_end; ++t) out.push_back(dealer_share_set(M, range, t, rng));
  return out;
}

/// One independent set per vector component (row or slot).
inline std::vector<ZeroShareSet> dealer_vector_shares(std::size_t M, std::size_t width, const ShareRange& range,
                                                      std::uint64_t t, RandomSource& rng) {
  std::vector<ZeroShareSet> out;
  for (std::size_t k = 0; k < width; ++k) out.push_back(dealer_share_set(M, range, t, rng));
  return out;
}

// ---------------------------------------------------------------------------
// Weighted shares: s_a + sum_i w_i s_i = 0 over the integers.

struct WeightedShareSet {
  std::vector<BigInt> agent_shares;
  BigInt aggregator_share;
  std::vector<BigInt> weights;

  bool zero_sum() const {
    BigInt sum = aggregator_share;
    for (std::size_t i = 0; i < weights.size(); ++i) sum += weights[i] * agent_shares[i];
    return sum == 0;
  }
};

inline BigInt weighted_aggregator_share(const std::vector<BigInt>& w, const std::vector<BigInt>& s) {
  require(w.size() == s.size(), Errc::kInvalidArgument, "weights and shares differ in length");
  BigInt sum = 0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * s[i];
  return -sum;
}

/// Agent shares are units of Z/N^2Z.
inline WeightedShareSet dealer_weighted_shares(const std::vector<BigInt>& w, const BigInt& n, RandomSource& rng) {
  WeightedShareSet out;
  out.weights = w;
  const BigInt n2 = n * n;
  for (std::size_t i = 0; i < w.size(); ++i) out.agent_shares.push_back(sample_unit(n2, rng));
  out.aggregator_share = weighted_aggregator_share(w, out.agent_shares);
  return out;
}

/// Largest |s_a| for M weights below 2^weight_bits and shares below N^2.
inline BigInt assisted_share_bound(std::size_t M, unsigned weight_bits, const BigInt& n) {
  return BigInt(static_cast<unsigned long>(M)) * pow2(weight_bits) * n * n;
}

/// Dealer side: E'(s_a) = prod E'(w_i)^{-s_i} under the helper key, computed
/// without seeing the weights.
inline paillier::Ciphertext assisted_encrypted_share(const paillier::PublicKey& helper,
                                                     const std::vector<paillier::Ciphertext>& enc_weights,
                                                     const std::vector<BigInt>& s) {
  require(enc_weights.size() == s.size() && !s.empty(), Errc::kInvalidArgument, "weights and shares differ in length");
  paillier::Ciphertext acc = helper.scale(enc_weights[0], -s[0]);
  for (std::size_t i = 1; i < s.size(); ++i) acc = helper.add(acc, helper.scale(enc_weights[i], -s[i]));
  return acc;
}

/// Aggregator side: decrypts and center-lifts. Throws kWrapDetected when the
/// helper modulus cannot hold [-bound, bound] or the value falls outside it.
inline BigInt recover_assisted_share(const paillier::KeyPair& helper, const paillier::Ciphertext& c,
                                     const BigInt& bound) {
  const BigInt& n_helper = helper.public_key().n();
  if (2 * bound >= n_helper) fail(Errc::kWrapDetected, "helper modulus too small for the weighted share range");
  BigInt s_a = center_lift(helper.decrypt(c), n_helper);
  if (abs(s_a) > bound) fail(Errc::kWrapDetected, "recovered share exceeds the no-wrap bound");
  return s_a;
}

/// Both halves: the aggregator encrypts its weights (w_i < 2^weight_bits)
/// under the helper key, the dealer folds in its secret shares.
inline BigInt dealer_assisted_weighted(const paillier::KeyPair& helper, const std::vector<BigInt>& w,
                                       const std::vector<BigInt>& s, unsigned weight_bits, const BigInt& n,
                                       RandomSource& rng) {
  std::vector<paillier::Ciphertext> enc_w;
  for (const auto& wi : w) enc_w.push_back(helper.public_key().encrypt(mod(wi, helper.public_key().n()), rng));
  auto c = assisted_encrypted_share(helper.public_key(), enc_w, s);
  return recover_assisted_share(helper, c, assisted_share_bound(w.size(), weight_bits, n));
}

// ---------------------------------------------------------------------------
// Unit repair

struct RepairResult {
  BigInt sigma_self;
  BigInt sigma_aggregator;
  BigInt mask;
  BigInt shift;  // 0 when the mask was already a unit
};

/// Smallest shift d >= 0 with gcd(s + d, N) = 1, moved from the aggregator's
/// piece to the agent's own piece; both pieces stay summing to the same value.
inline RepairResult gcd_repair(const BigInt& s, const BigInt& n, const BigInt& sigma_self,
                               const BigInt& sigma_aggregator) {
  BigInt d = 0;
  while (!is_unit(s + d, n)) ++d;
  return {mod(sigma_self + d, n), mod(sigma_aggregator - d, n), mod(s + d, n), d};
}

// ---------------------------------------------------------------------------
// Envelopes

constexpr std::size_t kEnvelopeHeaderBytes = 4 + 4 + 8 + kGcmNonceBytes;

struct ShareEnvelope {
  ParticipantId sender = 0;
  ParticipantId recipient = 0;
  std::uint64_t t = 0;
  GcmNonce nonce{};
  Bytes body;  // ciphertext || tag

  Bytes serialize() const {
    Bytes out;
    append_be32(out, sender);
    append_be32(out, recipient);
    append_be64(out, t);
    out.insert(out.end(), nonce.begin(), nonce.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
  }

  static ShareEnvelope parse(std::span<const std::uint8_t> in) {
    if (in.size() < kEnvelopeHeaderBytes + kGcmTagBytes) fail(Errc::kInvalidArgument, "truncated envelope");
    ShareEnvelope e;
    e.sender = static_cast<ParticipantId>(read_be(in.subspan(0, 4)));
    e.recipient = static_cast<ParticipantId>(read_be(in.subspan(4, 4)));
    e.t = read_be(in.subspan(8, 8));
    std::copy_n(in.begin() + 16, kGcmNonceBytes, e.nonce.begin());
    e.body.assign(in.begin() + kEnvelopeHeaderBytes, in.end());
    return e;
  }
};

/// Symmetric keys for every unordered pair of participants, provisioned at
/// setup.
class PairwiseKeys {
 public:
  static PairwiseKeys provision(std::size_t participants, RandomSource& rng) {
    PairwiseKeys k;
    for (ParticipantId a = 0; a < participants; ++a)
      for (ParticipantId b = a + 1; b < participants; ++b) {
        AesKey key{};
        rng.fill(key);
        k.keys_[{a, b}] = key;
      }
    return k;
  }

  const AesKey& key(ParticipantId a, ParticipantId b) const {
    auto it = keys_.find(std::minmax(a, b));
    if (it == keys_.end()) fail(Errc::kUnknownParticipant, "no pairwise key provisioned");
    return it->second;
  }

 private:
  std::map<std::pair<ParticipantId, ParticipantId>, AesKey> keys_;
};

/// Ring of the decentralized pieces. Modular pieces are uniform residues;
/// statistical pieces are drawn from (0, 2^bits) and the party's own piece
/// absorbs the negated sum, so sums hold over the integers.
struct ShareRing {
  bool modular = true;
  BigInt modulus;     // modular
  unsigned bits = 0;  // statistical
  std::size_t width = 1;
  bool repair_units = false;

  static ShareRing mod(BigInt modulus, std::size_t width = 1, bool repair_units = false) {
    return {true, std::move(modulus), 0, width, repair_units};
  }
  static ShareRing statistical(unsigned bits, std::size_t width = 1) { return {false, 0, bits, width, false}; }

  unsigned wire_bits() const { return modular ? static_cast<unsigned>(bit_length(modulus - 1)) : bits; }
  std::size_t body_bytes() const { return (wire_bits() * width + 7) / 8; }
  std::size_t envelope_bytes() const { return kEnvelopeHeaderBytes + body_bytes() + kGcmTagBytes; }

  BigInt sample(RandomSource& rng) const { return modular ? rng.below(modulus) : rng.between(1, pow2(bits) - 1); }
  BigInt reduce(const BigInt& v) const { return modular ? privagg::mod(v, modulus) : v; }

  Bytes encode(const std::vector<BigInt>& v) const {
    require(v.size() == width, Errc::kInvalidArgument, "share width mismatch");
    return to_fixed_bytes(pack(v, wire_bits()), body_bytes());
  }
  std::vector<BigInt> decode(std::span<const std::uint8_t> body) const {
    BigInt p;
    mpz_import(p.get_mpz_t(), body.size(), 1, 1, 1, 0, body.data());
    return unpack(p, wire_bits(), width);
  }
};

inline Bytes envelope_aad(const ShareEnvelope& e, std::size_t group) {
  Bytes aad;
  append_be32(aad, e.sender);
  append_be32(aad, e.recipient);
  append_be64(aad, e.t);
  append_be32(aad, static_cast<std::uint32_t>(group));
  return aad;
}

inline ShareEnvelope seal_share(const PairwiseKeys& keys, ParticipantId from, ParticipantId to, std::uint64_t t,
                                std::size_t group, const ShareRing& ring, const std::vector<BigInt>& share,
                                RandomSource& rng) {
  ShareEnvelope e;
  e.sender = from;
  e.recipient = to;
  e.t = t;
  rng.fill(e.nonce);
  e.body = aes_gcm_seal(keys.key(from, to), e.nonce, envelope_aad(e, group), ring.encode(share));
  return e;
}

inline std::vector<BigInt> open_share(const PairwiseKeys& keys, const ShareEnvelope& e, std::size_t group,
                                      const ShareRing& ring) {
  Bytes plain = aes_gcm_open(keys.key(e.sender, e.recipient), e.nonce, envelope_aad(e, group), e.body);
  return ring.decode(plain);
}

// ---------------------------------------------------------------------------
// Decentralized generation

/// One aggregation: an aggregator and the contributors masking toward it.
struct ShareGroup {
  ParticipantId aggregator = sim::kAggregator;
  std::vector<ParticipantId> contributors;
};

struct GroupMasks {
  std::vector<std::vector<BigInt>> contributor_masks;  // [contributor][component]
  std::vector<BigInt> aggregator_mask;

  bool zero_sum(const ShareRing& ring) const {
    for (std::size_t k = 0; k < aggregator_mask.size(); ++k) {
      BigInt sum = aggregator_mask[k];
      for (const auto& m : contributor_masks) sum += m[k];
      if (ring.reduce(sum) != 0) return false;
    }
    return true;
  }
};

struct ProtocolReport {
  std::vector<GroupMasks> groups;
  std::size_t rounds = 0;        // network rounds spent on the protocol
  std::size_t last_send_round = 0;
  std::size_t collusion_threshold = 0;
  std::size_t repairs = 0;
};

namespace detail {

class DecentralizedRun {
 public:
  DecentralizedRun(sim::Network& net, std::vector<ShareGroup> groups, ShareRing ring, std::uint64_t t,
                   const PairwiseKeys* keys, RandomSource& rng, bool relay)
      : net_(net), groups_(std::move(groups)), ring_(std::move(ring)), t_(t), keys_(keys), rng_(rng), relay_(relay) {
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const ShareGroup& grp = groups_[g];
      roles_.push_back({});
      roles_[g][grp.aggregator] = 0;
      for (std::size_t r = 0; r < grp.contributors.size(); ++r) {
        require(grp.contributors[r] != grp.aggregator, Errc::kInvalidArgument, "aggregator listed as contributor");
        roles_[g][grp.contributors[r]] = r + 1;
      }
      const std::size_t k = grp.contributors.size() + 1;
      received_.push_back(std::vector<std::map<std::size_t, std::vector<BigInt>>>(k));
      own_.push_back(std::vector<std::vector<std::vector<BigInt>>>(k));
    }
  }

  ProtocolReport run() {
    const std::size_t start = net_.round();
    for (ParticipantId p = 0; p < net_.topology().participants(); ++p)
      net_.set_handler(p, [this, p](sim::Outbox& out, const std::vector<sim::Message>& inbox) { step(p, out, inbox); });
    const std::size_t rounds = relay_ ? 4 : 2;
    for (std::size_t r = 0; r < rounds; ++r) net_.run_round();
    net_.clear_handlers();

    ProtocolReport report;
    report.rounds = net_.round() - start;
    for (const auto& m : net_.trace().messages)
      if (m.round > start) report.last_send_round = std::max(report.last_send_round, m.round - start);
    report.repairs = repairs_;
    report.collusion_threshold = relay_ ? min_contributors() - 1 : min_degree();
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      GroupMasks gm;
      gm.aggregator_mask = mask_of(g, 0);
      for (std::size_t r = 1; r <= groups_[g].contributors.size(); ++r) gm.contributor_masks.push_back(mask_of(g, r));
      report.groups.push_back(std::move(gm));
    }
    return report;
  }

 private:
  ParticipantId global(std::size_t g, std::size_t role) const {
    return role == 0 ? groups_[g].aggregator : groups_[g].contributors[role - 1];
  }

  /// Roles that exchange pieces with `role`: everyone for the relay
  /// protocol, direct neighbours for the one-round protocol.
  bool partners(std::size_t g, std::size_t a, std::size_t b) const {
    return relay_ || net_.topology().linked(global(g, a), global(g, b));
  }

  std::size_t min_degree() const {
    std::size_t best = SIZE_MAX;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const std::size_t k = groups_[g].contributors.size() + 1;
      for (std::size_t a = 0; a < k; ++a) {
        std::size_t d = 0;
        for (std::size_t b = 0; b < k; ++b) d += (a != b && partners(g, a, b));
        best = std::min(best, d);
      }
    }
    return best;
  }

  std::size_t min_contributors() const {
    std::size_t best = SIZE_MAX;
    for (const auto& g : groups_) best = std::min(best, g.contributors.size());
    return best;
  }

  std::string kind(const char* base, std::size_t g) const { return std::string(base) + "/" + std::to_string(g); }

  static std::size_t group_of(const std::string& kind) { return std::stoul(kind.substr(kind.find('/') + 1)); }

  void generate(std::size_t g, std::size_t role, sim::Outbox& out) {
    const std::size_t k = groups_[g].contributors.size() + 1;
    auto& pieces = own_[g][role];
    pieces.assign(k, std::vector<BigInt>(ring_.width, 0));
    std::vector<BigInt> total(ring_.width, 0);
    for (std::size_t to = 0; to < k; ++to) {
      if (to == role || !partners(g, role, to)) continue;
      for (std::size_t c = 0; c < ring_.width; ++c) {
        pieces[to][c] = ring_.sample(rng_);
        total[c] += pieces[to][c];
      }
    }
    for (std::size_t c = 0; c < ring_.width; ++c) pieces[role][c] = ring_.reduce(-total[c]);
    received_[g][role][role] = pieces[role];

    const ParticipantId self = global(g, role);
    for (std::size_t to = 0; to < k; ++to) {
      if (to == role || !partners(g, role, to)) continue;
      const ParticipantId dest = global(g, to);
      Bytes env = seal_share(*keys_, self, dest, t_, g, ring_, pieces[to], rng_).serialize();
      if (net_.topology().linked(self, dest))
        out.send(dest, kind("share", g), std::move(env));
      else
        out.send(groups_[g].aggregator, kind("relay", g), std::move(env));
    }
  }

  void accept(std::size_t g, std::span<const std::uint8_t> bytes) {
    ShareEnvelope e = ShareEnvelope::parse(bytes);
    auto from = roles_[g].find(e.sender);
    auto to = roles_[g].find(e.recipient);
    if (from == roles_[g].end() || to == roles_[g].end()) fail(Errc::kUnknownParticipant, "envelope outside the group");
    if (e.t != t_) fail(Errc::kProtocolAbort, "envelope for another time step");
    received_[g][to->second][from->second] = open_share(*keys_, e, g, ring_);
  }

  void forward_relays(ParticipantId self, sim::Outbox& out, const std::vector<sim::Message>& inbox) {
    // Per group: envelopes sorted by (recipient, sender), one batch per recipient.
    std::map<std::size_t, std::vector<ShareEnvelope>> by_group;
    for (const auto& m : inbox)
      if (m.kind.rfind("relay/", 0) == 0) by_group[group_of(m.kind)].push_back(ShareEnvelope::parse(m.payload));
    for (auto& [g, envs] : by_group) {
      require(groups_[g].aggregator == self, Errc::kProtocolAbort, "relay sent to a non-aggregator");
      std::stable_sort(envs.begin(), envs.end(), [](const ShareEnvelope& a, const ShareEnvelope& b) {
        return std::tie(a.recipient, a.sender) < std::tie(b.recipient, b.sender);
      });
      std::map<ParticipantId, Bytes> batches;
      for (const auto& e : envs) {
        Bytes wire = e.serialize();
        auto& b = batches[e.recipient];
        b.insert(b.end(), wire.begin(), wire.end());
      }
      for (auto& [dest, batch] : batches) out.send(dest, kind("batch", g), std::move(batch));
    }
  }

  void absorb(const std::vector<sim::Message>& inbox) {
    const std::size_t env = ring_.envelope_bytes();
    for (const auto& m : inbox) {
      const std::size_t g = group_of(m.kind);
      if (m.kind.rfind("share/", 0) == 0 || m.kind.rfind("repair/", 0) == 0) {
        accept(g, m.payload);
      } else if (m.kind.rfind("batch/", 0) == 0) {
        require(m.payload.size() % env == 0, Errc::kProtocolAbort, "batch length is not a whole number of envelopes");
        for (std::size_t off = 0; off < m.payload.size(); off += env)
          accept(g, std::span<const std::uint8_t>(m.payload).subspan(off, env));
      }
    }
  }

  void check_complete(std::size_t g, std::size_t role) const {
    const std::size_t k = groups_[g].contributors.size() + 1;
    for (std::size_t from = 0; from < k; ++from)
      if (partners(g, from, role) && !received_[g][role].count(from))
        fail(Errc::kProtocolAbort, "missing share from participant " + std::to_string(global(g, from)));
  }

  void finalize(std::size_t g, std::size_t role, sim::Outbox& out) {
    check_complete(g, role);
    if (role == 0 || !ring_.repair_units) return;
    std::vector<BigInt> s = mask_of(g, role);
    auto& pieces = own_[g][role];
    bool changed = false;
    for (std::size_t c = 0; c < ring_.width; ++c) {
      RepairResult fix = gcd_repair(s[c], ring_.modulus, pieces[role][c], pieces[0][c]);
      if (fix.shift == 0) continue;
      pieces[role][c] = fix.sigma_self;
      pieces[0][c] = fix.sigma_aggregator;
      changed = true;
    }
    if (!changed) return;
    ++repairs_;
    received_[g][role][role] = pieces[role];
    const ParticipantId self = global(g, role);
    out.send(groups_[g].aggregator, kind("repair", g),
             seal_share(*keys_, self, groups_[g].aggregator, t_, g, ring_, pieces[0], rng_).serialize());
  }

  std::vector<BigInt> mask_of(std::size_t g, std::size_t role) const {
    std::vector<BigInt> s(ring_.width, 0);
    for (const auto& [from, piece] : received_[g][role])
      for (std::size_t c = 0; c < ring_.width; ++c) s[c] += piece[c];
    for (auto& v : s) v = ring_.reduce(v);
    return s;
  }

  void step(ParticipantId p, sim::Outbox& out, const std::vector<sim::Message>& inbox) {
    const std::size_t local_round = ++rounds_seen_[p];
    absorb(inbox);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      auto it = roles_[g].find(p);
      if (it == roles_[g].end()) continue;
      const std::size_t role = it->second;
      if (local_round == 1) generate(g, role, out);
      if (!relay_ && local_round == 2) check_complete(g, role);
      if (relay_ && local_round == 3) finalize(g, role, out);
    }
    if (relay_ && local_round == 2) forward_relays(p, out, inbox);
  }

  sim::Network& net_;
  std::vector<ShareGroup> groups_;
  ShareRing ring_;
  std::uint64_t t_;
  const PairwiseKeys* keys_;
  RandomSource& rng_;
  bool relay_;
  std::vector<std::map<ParticipantId, std::size_t>> roles_;
  std::vector<std::vector<std::map<std::size_t, std::vector<BigInt>>>> received_;  // [g][to][from]
  std::vector<std::vector<std::vector<std::vector<BigInt>>>> own_;                // [g][from][to]
  std::map<ParticipantId, std::size_t> rounds_seen_;
  std::size_t repairs_ = 0;
};

}  // namespace detail

/// Each party sends one piece to each direct neighbour in its group; masks
/// are the sums of received pieces. Round 1 sends, round 2 sums. The group
/// is always connected through its aggregator.
inline ProtocolReport one_round_decentralized(sim::Network& net, const std::vector<ShareGroup>& groups,
                                              const ShareRing& ring, std::uint64_t t, const PairwiseKeys& keys,
                                              RandomSource& rng) {
  return detail::DecentralizedRun(net, groups, ring, t, &keys, rng, false).run();
}

/// Every party sends a piece to every other party of its group; pieces for
/// non-neighbours go sealed through the group aggregator, which batches them.
///   round 1 (t-2): generate and send or hand to the aggregator
///   round 2 (t-1): the aggregator forwards batches
///   round 3 (t):   agents sum, repair non-units, send the adjusted piece to
///                  the aggregator
/// A fourth delivery hands the adjusted pieces to the aggregator, which is
/// the delivery that carries the time-t contributions in a scheme run.
inline ProtocolReport two_round_relay(sim::Network& net, const std::vector<ShareGroup>& groups,
                                      const ShareRing& ring, std::uint64_t t, const PairwiseKeys& keys,
                                      RandomSource& rng) {
  return detail::DecentralizedRun(net, groups, ring, t, &keys, rng, true).run();
}

}  // namespace privagg::shares
