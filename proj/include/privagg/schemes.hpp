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

// Private (weighted) sum aggregation schemes.
//
// All five schemes compute sum_i W_i x_i over raw fixed-point integers, so the
// result carries 2 l_f fractional bits. Every scheme goes through the same
// four calls:
//
//   setup(dims, config, rng)     moduli, keys, dealer masks for t in [0, T)
//   init_weights(W, rng)         hand weights to whoever holds them
//   encrypt(i, t, x_i, rng)      agent i's contribution for step t
//   aggregate(t, contributions)  the aggregator's result
//
//   psa1    agents hold W_i; c = W_i x_i + s_i mod Q
//   psa2    agents hold W_i; c = (1+N)^{W_i x_i} H(t)^{s_i} mod N^2,
//           optionally with several rows packed per element
//   pwsac   aggregator holds W_i; c^[j] = (1+N)^{x_j} H(t)^{s^[j]}
//   pwsah   nobody sees W_i; agents get E(W_i) and send E(W_i x_i + s_i)
//   pwsah*  as pwsah with the rows of W_i packed into slots

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "privagg/encoding.hpp"
#include "privagg/paillier.hpp"
#include "privagg/simnet.hpp"
#include "privagg/zeroshares.hpp"

namespace privagg::schemes {

enum class SchemeId { kPsa1, kPsa2, kPwsac, kPwsah, kPwsahPacked };

inline constexpr std::array<SchemeId, 5> kAllSchemes{SchemeId::kPsa1, SchemeId::kPsa2, SchemeId::kPwsac,
                                                     SchemeId::kPwsah, SchemeId::kPwsahPacked};

inline std::string_view scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::kPsa1: return "psa1";
    case SchemeId::kPsa2: return "psa2";
    case SchemeId::kPwsac: return "pwsac";
    case SchemeId::kPwsah: return "pwsah";
    case SchemeId::kPwsahPacked: return "pwsah*";
  }
  return "?";
}

inline SchemeId parse_scheme(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "pwsah-packed" || s == "pwsahp" || s == "packed") return SchemeId::kPwsahPacked;
  for (SchemeId id : kAllSchemes)
    if (s == scheme_name(id)) return id;
  fail(Errc::kConfig, "unknown scheme '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Round base H(t)

inline const Bytes& default_hash_tag() {
  static const Bytes tag = [] {
    const std::string_view s = "privagg/round-base/v1";
    return Bytes(s.begin(), s.end());
  }();
  return tag;
}

struct HashSpec {
  Bytes tag = default_hash_tag();
  BigInt n2;
  std::optional<BigInt> stub;  // fixed H for golden traces
};

namespace detail {
inline BigInt expand_to_residue(const HashSpec& spec, std::uint64_t t, std::optional<std::uint32_t> attempt) {
  Bytes prefix = spec.tag;
  append_be64(prefix, t);
  if (attempt) append_be32(prefix, *attempt);
  // Twice the target length keeps the reduction bias negligible.
  return mod(from_bytes(sha256_expand(prefix, (2 * bit_length(spec.n2) + 7) / 8)), spec.n2);
}
}  // namespace detail

/// SHA-256 counter-mode expansion of tag || be64(t), reduced mod N^2. May
/// return a non-unit.
inline BigInt derive_round_base(const HashSpec& spec, std::uint64_t t) {
  require(spec.n2 > 1, Errc::kInvalidArgument, "hash spec without a modulus");
  if (spec.stub) return mod(*spec.stub, spec.n2);
  return detail::expand_to_residue(spec, t, std::nullopt);
}

constexpr std::uint32_t kRoundBaseRetries = 64;

/// The round base the schemes use. Aggregation raises H(t) to negative
/// exponents, so a non-unit draw is re-hashed with a counter suffix.
inline BigInt derive_unit_round_base(const HashSpec& spec, std::uint64_t t) {
  BigInt h = derive_round_base(spec, t);
  for (std::uint32_t attempt = 1; !is_unit(h, spec.n2); ++attempt) {
    if (spec.stub || attempt > kRoundBaseRetries) fail(Errc::kNotInvertible, "round base is not a unit");
    h = detail::expand_to_residue(spec, t, attempt);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Problem data

using Vector = std::vector<BigInt>;
using Weights = std::vector<Matrix<BigInt>>;  // W_i: rows x cols_i, raw fixed point
using Inputs = std::vector<Vector>;           // x_i: cols_i, raw fixed point

struct Dims {
  std::size_t agents = 0;
  std::size_t rows = 1;            // n_a
  std::vector<std::size_t> cols;   // n_i per agent

  std::size_t max_cols() const { return cols.empty() ? 0 : *std::max_element(cols.begin(), cols.end()); }

  static Dims uniform(std::size_t agents, std::size_t rows, std::size_t cols) {
    return {agents, rows, std::vector<std::size_t>(agents, cols)};
  }

  static Dims of(const Weights& w) {
    require(!w.empty(), Errc::kInvalidArgument, "no agents");
    Dims d{w.size(), w[0].rows(), {}};
    for (const auto& wi : w) {
      require(wi.rows() == d.rows, Errc::kInvalidArgument, "weight matrices differ in row count");
      d.cols.push_back(wi.cols());
    }
    return d;
  }
};

/// sum_i W_i x_i over the integers.
inline Vector plaintext_oracle(const Weights& w, const Inputs& x) {
  require(w.size() == x.size() && !w.empty(), Errc::kInvalidArgument, "weights and inputs differ in agent count");
  Vector out(w[0].rows(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    require(w[i].cols() == x[i].size(), Errc::kInvalidArgument, "input length does not match weight columns");
    Vector y = matvec(w[i], x[i]);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += y[k];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Costs

struct CostPrediction {
  std::size_t exps = 0;
  std::size_t cipher_adds = 0;
  std::size_t ciphertexts_sent = 0;
  std::size_t share_bits_per_neighbor = 0;

  friend bool operator==(const CostPrediction&, const CostPrediction&) = default;
};

/// Per-agent online cost of one step. `m` is the slot count of a packed
/// plaintext (use 1 for unpacked psa2). The share-bit column counts the mask
/// bits a neighbour receives for the decentralized generation: one
/// (2l + lambda)-bit piece per row unpacked, one gamma-bit piece per row packed.
inline CostPrediction predict_costs(SchemeId id, std::size_t M, std::size_t n_i, std::size_t n_a, std::size_t m,
                                    unsigned l = 32, unsigned lambda = 80) {
  require(M >= 1 && n_i >= 1 && n_a >= 1 && m >= 1, Errc::kInvalidArgument, "predict_costs: empty dimension");
  const std::size_t groups = ceil_div(n_a, m);
  switch (id) {
    case SchemeId::kPsa1: return {0, 0, n_a, 0};
    case SchemeId::kPsa2: return {groups, groups, groups, 0};
    case SchemeId::kPwsac: return {n_i, n_i, n_i, 0};
    case SchemeId::kPwsah: return {n_a * n_i, n_a * (n_i - 1), n_a, (2 * l + lambda) * n_a};
    case SchemeId::kPwsahPacked: {
      const std::size_t gamma = 2 * l + 1 + ceil_log2(n_i) + ceil_log2(M);
      return {groups * n_i, groups * (n_i - 1), groups, gamma * n_a};
    }
  }
  return {};
}

/// Budget for packed sums of n-term products of l-bit values (psa2 batching).
inline BitBudget packed_sum_budget(unsigned l, std::size_t n, std::size_t M, std::size_t plaintext_bits) {
  BitBudget b;
  b.gamma = 2 * l + 1 + ceil_log2(n);
  b.delta = b.gamma + 1 + ceil_log2(M);
  b.m = plaintext_bits > 0 ? (plaintext_bits - 1) / b.delta : 0;
  return b;
}

// ---------------------------------------------------------------------------
// Contributions

enum class PayloadKind : std::uint8_t { kMaskedResidue = 1, kGroupElement = 2, kCiphertext = 3 };

inline std::string_view payload_kind_name(PayloadKind k) {
  switch (k) {
    case PayloadKind::kMaskedResidue: return "masked-residue";
    case PayloadKind::kGroupElement: return "group-element";
    case PayloadKind::kCiphertext: return "ciphertext";
  }
  return "?";
}

// be32 agent | be64 t | kind | be32 width | be32 count | be64 modulus id
constexpr std::size_t kContributionHeaderBytes = 4 + 8 + 1 + 4 + 4 + 8;

struct Contribution {
  std::uint32_t agent = 0;
  std::uint64_t t = 0;
  PayloadKind kind = PayloadKind::kMaskedResidue;
  std::uint32_t width = 0;  // bytes per element
  paillier::Fingerprint modulus_id = 0;
  Vector values;

  std::size_t payload_bytes() const { return static_cast<std::size_t>(width) * values.size(); }

  Bytes payload() const {
    Bytes out;
    for (const auto& v : values) {
      Bytes b = to_fixed_bytes(v, width);
      out.insert(out.end(), b.begin(), b.end());
    }
    return out;
  }

  Bytes serialize() const {
    Bytes out;
    append_be32(out, agent);
    append_be64(out, t);
    out.push_back(static_cast<std::uint8_t>(kind));
    append_be32(out, width);
    append_be32(out, static_cast<std::uint32_t>(values.size()));
    append_be64(out, modulus_id);
    Bytes p = payload();
    out.insert(out.end(), p.begin(), p.end());
    return out;
  }

  static Contribution parse(std::span<const std::uint8_t> in) {
    require(in.size() >= kContributionHeaderBytes, Errc::kInvalidArgument, "truncated contribution header");
    Contribution c;
    c.agent = static_cast<std::uint32_t>(read_be(in.subspan(0, 4)));
    c.t = read_be(in.subspan(4, 8));
    const std::uint8_t kind = in[12];
    require(kind >= 1 && kind <= 3, Errc::kInvalidArgument, "unknown payload kind");
    c.kind = static_cast<PayloadKind>(kind);
    c.width = static_cast<std::uint32_t>(read_be(in.subspan(13, 4)));
    const std::size_t count = read_be(in.subspan(17, 4));
    c.modulus_id = read_be(in.subspan(21, 8));
    require(in.size() == kContributionHeaderBytes + count * c.width, Errc::kInvalidArgument,
            "contribution length does not match its header");
    for (std::size_t e = 0; e < count; ++e)
      c.values.push_back(from_bytes(in.subspan(kContributionHeaderBytes + e * c.width, c.width)));
    return c;
  }

  std::vector<paillier::Ciphertext> ciphertexts() const {
    require(kind == PayloadKind::kCiphertext, Errc::kInvalidArgument, "contribution carries no ciphertexts");
    std::vector<paillier::Ciphertext> out;
    for (const auto& v : values) out.push_back({v, modulus_id});
    return out;
  }

  friend bool operator==(const Contribution&, const Contribution&) = default;
};

inline std::uint32_t bytes_for(const BigInt& modulus) { return static_cast<std::uint32_t>((bit_length(modulus - 1) + 7) / 8); }

/// One line per contribution: `t,sender,payload-kind,hex`. The sender is the
/// 1-based agent index, matching simulator participant ids.
inline void write_transcript(std::ostream& os, const std::vector<Contribution>& cs) {
  for (const auto& c : cs)
    os << c.t << ',' << c.agent + 1 << ',' << payload_kind_name(c.kind) << ',' << to_hex(c.payload()) << '\n';
}

// ---------------------------------------------------------------------------
// Scheme interface

struct SchemeConfig {
  FixedFormat fmt{16, 16};
  std::size_t kappa = 2048;       // bit length of N
  unsigned lambda = 80;
  std::uint64_t horizon = 1;      // masks are dealt for t in [0, horizon)
  Bytes hash_tag = default_hash_tag();
  std::optional<BigInt> hash_stub;
  std::shared_ptr<const paillier::KeyPair> keys;  // reused instead of generated
  std::optional<BigInt> modulus_q;                // psa1
  std::optional<BitBudget> budget;                // psa2 batching, pwsah*
  bool pack = false;                              // psa2 batching
  enum class Masks { kAuto, kUnits, kStatistical } masks = Masks::kAuto;  // pwsah
  bool check_capacity = true;  // reject dims whose worst-case sum wraps
};

/// Masks for one step: agent[i][component], aggregator[component].
struct StepShares {
  std::vector<Vector> agent;
  Vector aggregator;

  /// Zero-sum per component; modulus 0 means over the integers.
  bool zero_sum(const BigInt& modulus) const {
    for (std::size_t k = 0; k < aggregator.size(); ++k) {
      BigInt s = aggregator[k];
      for (const auto& a : agent) s += a[k];
      if (modulus == 0 ? s != 0 : mod(s, modulus) != 0) return false;
    }
    return true;
  }
};

/// Transposes one dealer set per component into per-agent vectors.
inline StepShares from_component_sets(const std::vector<shares::ZeroShareSet>& sets, std::size_t agents) {
  StepShares out;
  out.agent.assign(agents, Vector(sets.size()));
  for (std::size_t k = 0; k < sets.size(); ++k) {
    for (std::size_t i = 0; i < agents; ++i) out.agent[i][k] = sets[k].agent_shares[i];
    out.aggregator.push_back(sets[k].aggregator_share);
  }
  return out;
}

class Scheme {
 public:
  virtual ~Scheme() = default;

  virtual SchemeId id() const = 0;

  void setup(const Dims& dims, const SchemeConfig& cfg, RandomSource& rng) {
    require(dims.agents >= 1 && dims.rows >= 1 && dims.cols.size() == dims.agents, Errc::kInvalidArgument,
            "setup: inconsistent dimensions");
    for (auto c : dims.cols) require(c >= 1, Errc::kInvalidArgument, "setup: agent without inputs");
    dims_ = dims;
    cfg_ = cfg;
    shares_.clear();
    do_setup(rng);
  }

  virtual void init_weights(const Weights& w, RandomSource& rng) = 0;
  virtual Contribution encrypt(std::size_t agent, std::uint64_t t, const Vector& x, RandomSource& rng) const = 0;
  virtual Vector aggregate(std::uint64_t t, const std::vector<Contribution>& cs) const = 0;

  /// Shape and range check of a contribution as the aggregator receives it.
  virtual bool well_formed(const Contribution& c) const = 0;

  virtual CostPrediction predicted(std::size_t agent) const = 0;

  /// Components per agent mask and modulus of the mask ring (0: integers).
  virtual std::size_t share_width(std::size_t agent) const = 0;
  virtual std::size_t aggregator_share_width() const { return dims_.rows; }
  virtual BigInt share_modulus() const { return 0; }

  /// Replaces the masks for step t, e.g. with decentrally generated ones.
  virtual void provision(std::uint64_t t, StepShares s) {
    require(s.agent.size() == dims_.agents, Errc::kInvalidArgument, "provision: wrong agent count");
    for (std::size_t i = 0; i < dims_.agents; ++i)
      require(s.agent[i].size() == share_width(i), Errc::kInvalidArgument, "provision: wrong mask width");
    require(s.aggregator.size() == aggregator_share_width(), Errc::kInvalidArgument,
            "provision: wrong aggregator mask width");
    shares_[one_time() ? 0 : t] = std::move(s);
  }

  const StepShares& shares_at(std::uint64_t t) const {
    auto it = shares_.find(one_time() ? 0 : t);
    if (it == shares_.end()) fail(Errc::kProtocolAbort, "no masks provisioned for t = " + std::to_string(t));
    return it->second;
  }

  const Dims& dims() const { return dims_; }
  const SchemeConfig& config() const { return cfg_; }

 protected:
  virtual void do_setup(RandomSource& rng) = 0;

  /// Masks reused across steps (the round base changes instead).
  virtual bool one_time() const { return false; }

  void check_weights(const Weights& w) const {
    require(w.size() == dims_.agents, Errc::kInvalidArgument, "weights: wrong agent count");
    for (std::size_t i = 0; i < w.size(); ++i) {
      require(w[i].rows() == dims_.rows && w[i].cols() == dims_.cols[i], Errc::kInvalidArgument,
              "weights: wrong shape");
      for (std::size_t r = 0; r < w[i].rows(); ++r)
        for (std::size_t c = 0; c < w[i].cols(); ++c) check_fixed_range(w[i](r, c), cfg_.fmt);
    }
  }

  void check_input(std::size_t agent, const Vector& x) const {
    require(agent < dims_.agents, Errc::kUnknownParticipant, "agent index out of range");
    require(x.size() == dims_.cols[agent], Errc::kInvalidArgument, "input length does not match n_i");
    for (const auto& v : x) check_fixed_range(v, cfg_.fmt);
  }

  /// Exactly one contribution per agent, all for step t; returns them in
  /// agent order.
  std::vector<const Contribution*> collect(std::uint64_t t, const std::vector<Contribution>& cs) const {
    std::vector<const Contribution*> by_agent(dims_.agents, nullptr);
    for (const auto& c : cs) {
      require(c.agent < dims_.agents, Errc::kUnknownParticipant, "contribution from an unknown agent");
      require(c.t == t, Errc::kInvalidArgument, "contribution for a different step");
      require(by_agent[c.agent] == nullptr, Errc::kInvalidArgument, "duplicate contribution");
      require(well_formed(c), Errc::kMalformedCiphertext, "malformed contribution");
      by_agent[c.agent] = &c;
    }
    for (std::size_t i = 0; i < dims_.agents; ++i)
      if (!by_agent[i]) fail(Errc::kMissingContribution, "no contribution from agent " + std::to_string(i + 1));
    return by_agent;
  }

  /// Bits of the largest |sum_i W_i x_i|, plus one for the sign.
  unsigned aggregate_bits() const {
    return 2 * cfg_.fmt.l() - 1 + ceil_log2(dims_.max_cols()) + ceil_log2(dims_.agents);
  }

  void check_capacity(const BigInt& modulus) const {
    if (cfg_.check_capacity && bit_length(modulus) <= aggregate_bits() + 1)
      fail(Errc::kOverflowGuard, "modulus too small for the aggregate range");
  }

  Dims dims_;
  SchemeConfig cfg_;
  std::map<std::uint64_t, StepShares> shares_;
};

namespace detail {

inline std::shared_ptr<const paillier::KeyPair> keys_for(const SchemeConfig& cfg, RandomSource& rng) {
  if (cfg.keys) return cfg.keys;
  return std::make_shared<const paillier::KeyPair>(paillier::KeyPair::generate(cfg.kappa, rng));
}

inline bool is_group_element(const Contribution& c, const BigInt& n2, std::size_t count) {
  if (c.kind != PayloadKind::kGroupElement || c.values.size() != count || c.width != bytes_for(n2)) return false;
  for (const auto& v : c.values)
    if (v <= 0 || v >= n2 || !is_unit(v, n2)) return false;
  return true;
}

inline bool is_ciphertext_list(const Contribution& c, const paillier::PublicKey& pk, std::size_t count) {
  if (c.kind != PayloadKind::kCiphertext || c.values.size() != count || c.modulus_id != pk.fingerprint() ||
      c.width != pk.ciphertext_bytes())
    return false;
  for (const auto& v : c.values)
    if (v <= 0 || v >= pk.n_squared() || !is_unit(v, pk.n())) return false;
  return true;
}

/// (1 + N)^m mod N^2 without an exponentiation.
inline BigInt gamma_power(const BigInt& m, const BigInt& n, const BigInt& n2) { return (1 + mod(m, n) * n) % n2; }

}  // namespace detail

// ---------------------------------------------------------------------------
// psa1: masking mod Q

class Psa1 : public Scheme {
 public:
  SchemeId id() const override { return SchemeId::kPsa1; }
  const BigInt& q() const { return q_; }

  void init_weights(const Weights& w, RandomSource&) override {
    check_weights(w);
    w_ = w;
  }

  Contribution encrypt(std::size_t agent, std::uint64_t t, const Vector& x, RandomSource&) const override {
    check_input(agent, x);
    require(!w_.empty(), Errc::kInvalidArgument, "weights not initialised");
    const Vector& s = shares_at(t).agent[agent];
    Vector v = matvec(w_[agent], x);
    Contribution c{static_cast<std::uint32_t>(agent), t, PayloadKind::kMaskedResidue, bytes_for(q_), 0, {}};
    for (std::size_t k = 0; k < v.size(); ++k) c.values.push_back(mod(v[k] + s[k], q_));
    return c;
  }

  Vector aggregate(std::uint64_t t, const std::vector<Contribution>& cs) const override {
    auto by_agent = collect(t, cs);
    Vector out = shares_at(t).aggregator;
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (const auto* c : by_agent) out[k] += c->values[k];
      out[k] = center_lift(mod(out[k], q_), q_);
    }
    return out;
  }

  bool well_formed(const Contribution& c) const override {
    if (c.kind != PayloadKind::kMaskedResidue || c.values.size() != dims_.rows || c.width != bytes_for(q_))
      return false;
    return std::all_of(c.values.begin(), c.values.end(), [&](const BigInt& v) { return v >= 0 && v < q_; });
  }

  CostPrediction predicted(std::size_t agent) const override {
    return predict_costs(id(), dims_.agents, dims_.cols[agent], dims_.rows, 1);
  }

  std::size_t share_width(std::size_t) const override { return dims_.rows; }
  BigInt share_modulus() const override { return q_; }

 protected:
  void do_setup(RandomSource& rng) override {
    const std::size_t bits = std::max<std::size_t>(cfg_.kappa, aggregate_bits() + 2);
    q_ = cfg_.modulus_q ? *cfg_.modulus_q : pow2(bits);
    require(q_ >= 2, Errc::kInvalidArgument, "psa1: modulus below 2");
    check_capacity(q_);
    const auto range = shares::ShareRange::mod_q(q_);
    for (std::uint64_t t = 0; t < cfg_.horizon; ++t)
      shares_[t] = from_component_sets(shares::dealer_vector_shares(dims_.agents, dims_.rows, range, t, rng),
                                       dims_.agents);
  }

 private:
  BigInt q_;
  Weights w_;
};

// ---------------------------------------------------------------------------
// psa2: one-time exponent masks over a hashed round base

class Psa2 : public Scheme {
 public:
  SchemeId id() const override { return SchemeId::kPsa2; }
  const BigInt& n() const { return n_; }
  const BitBudget& budget() const { return budget_; }
  bool packed() const { return cfg_.pack; }
  const HashSpec& hash() const { return hash_; }

  void init_weights(const Weights& w, RandomSource&) override {
    check_weights(w);
    w_ = w;
  }

  Contribution encrypt(std::size_t agent, std::uint64_t t, const Vector& x, RandomSource&) const override {
    check_input(agent, x);
    require(!w_.empty(), Errc::kInvalidArgument, "weights not initialised");
    const Vector& s = shares_at(t).agent[agent];
    const Vector v = matvec(w_[agent], x);
    const BigInt h = derive_unit_round_base(hash_, t);
    Contribution c{static_cast<std::uint32_t>(agent), t, PayloadKind::kGroupElement, bytes_for(n2_), 0, {}};
    for (std::size_t e = 0; e < elements(); ++e) {
      BigInt plain;
      if (cfg_.pack) {
        Vector slots;
        for (std::size_t k = groups_[e].begin; k < groups_[e].end; ++k) slots.push_back(lift_offset(v[k], budget_.gamma));
        plain = pack(slots, budget_.delta);
      } else {
        plain = v[e];
      }
      count_mult();
      c.values.push_back(detail::gamma_power(plain, n_, n2_) * mod_pow_signed(h, s[e], n2_) % n2_);
    }
    return c;
  }

  Vector aggregate(std::uint64_t t, const std::vector<Contribution>& cs) const override {
    auto by_agent = collect(t, cs);
    const StepShares& sh = shares_at(t);
    const BigInt h = derive_unit_round_base(hash_, t);
    Vector out;
    for (std::size_t e = 0; e < elements(); ++e) {
      BigInt acc = mod_pow_signed(h, sh.aggregator[e], n2_);
      for (const auto* c : by_agent) {
        count_mult();
        acc = acc * c->values[e] % n2_;
      }
      const BigInt beta = paillier::gamma_dlog(acc, n_);
      if (!cfg_.pack) {
        out.push_back(center_lift(beta, n_));
        continue;
      }
      for (const auto& slot : unpack(beta, budget_.delta, groups_[e].size()))
        out.push_back(drop_offset(slot, budget_.gamma, dims_.agents));
    }
    return out;
  }

  bool well_formed(const Contribution& c) const override { return detail::is_group_element(c, n2_, elements()); }

  CostPrediction predicted(std::size_t agent) const override {
    return predict_costs(id(), dims_.agents, dims_.cols[agent], dims_.rows, cfg_.pack ? budget_.m : 1);
  }

  std::size_t share_width(std::size_t) const override { return elements(); }
  std::size_t aggregator_share_width() const override { return elements(); }

 protected:
  bool one_time() const override { return true; }

  void do_setup(RandomSource& rng) override {
    n_ = cfg_.keys ? cfg_.keys->public_key().n() : gen_modulus(cfg_.kappa, rng).n;
    n2_ = n_ * n_;
    hash_ = HashSpec{cfg_.hash_tag, n2_, cfg_.hash_stub};
    if (cfg_.pack) {
      budget_ = cfg_.budget ? *cfg_.budget
                            : packed_sum_budget(cfg_.fmt.l(), dims_.max_cols(), dims_.agents, bit_length(n_));
      if (budget_.m == 0 || budget_.m * budget_.delta >= bit_length(n_))
        fail(Errc::kSlotOverflow, "psa2: no slot fits the modulus");
      groups_ = row_groups(dims_.rows, budget_.m);
    } else {
      check_capacity(n_);
    }
    // Exponent masks in (0, N^2), units, reused for every t.
    const auto range = shares::ShareRange::integers(n2_, n_);
    shares_[0] = from_component_sets(shares::dealer_vector_shares(dims_.agents, elements(), range, 0, rng),
                                     dims_.agents);
  }

 private:
  std::size_t elements() const { return cfg_.pack ? groups_.size() : dims_.rows; }

  BigInt n_, n2_;
  HashSpec hash_;
  BitBudget budget_;
  std::vector<RowGroup> groups_;
  Weights w_;
};

// ---------------------------------------------------------------------------
// pwsac: aggregator-held weights applied in the exponent

class Pwsac : public Scheme {
 public:
  SchemeId id() const override { return SchemeId::kPwsac; }
  const BigInt& n() const { return n_; }
  const HashSpec& hash() const { return hash_; }

  /// The aggregator receives W~_i = W_i mod N and, from the dealer,
  /// s_a^[k] = -sum_i sum_j W~_i^[kj] s_i^[j].
  void init_weights(const Weights& w, RandomSource&) override {
    check_weights(w);
    w_.clear();
    for (const auto& wi : w) {
      Matrix<BigInt> lifted(wi.rows(), wi.cols());
      for (std::size_t r = 0; r < wi.rows(); ++r)
        for (std::size_t c = 0; c < wi.cols(); ++c) lifted(r, c) = lift_mod(wi(r, c), n_);
      w_.push_back(std::move(lifted));
    }
    StepShares& sh = shares_.at(0);
    sh.aggregator = aggregator_shares(sh.agent);
  }

  Vector aggregator_shares(const std::vector<Vector>& agent) const {
    Vector out(dims_.rows, 0);
    for (std::size_t k = 0; k < dims_.rows; ++k)
      for (std::size_t i = 0; i < dims_.agents; ++i)
        for (std::size_t j = 0; j < dims_.cols[i]; ++j) out[k] -= w_[i](k, j) * agent[i][j];
    return out;
  }

  Contribution encrypt(std::size_t agent, std::uint64_t t, const Vector& x, RandomSource&) const override {
    check_input(agent, x);
    const Vector& s = shares_at(t).agent[agent];
    const BigInt h = derive_unit_round_base(hash_, t);
    Contribution c{static_cast<std::uint32_t>(agent), t, PayloadKind::kGroupElement, bytes_for(n2_), 0, {}};
    for (std::size_t j = 0; j < x.size(); ++j) {
      count_mult();
      c.values.push_back(detail::gamma_power(x[j], n_, n2_) * mod_pow_signed(h, s[j], n2_) % n2_);
    }
    return c;
  }

  Vector aggregate(std::uint64_t t, const std::vector<Contribution>& cs) const override {
    require(!w_.empty(), Errc::kInvalidArgument, "weights not initialised");
    auto by_agent = collect(t, cs);
    const StepShares& sh = shares_at(t);
    const BigInt h = derive_unit_round_base(hash_, t);
    Vector out;
    for (std::size_t k = 0; k < dims_.rows; ++k) {
      BigInt acc = mod_pow_signed(h, sh.aggregator[k], n2_);
      for (std::size_t i = 0; i < dims_.agents; ++i)
        for (std::size_t j = 0; j < dims_.cols[i]; ++j) {
          count_mult();
          acc = acc * mod_pow_signed(by_agent[i]->values[j], w_[i](k, j), n2_) % n2_;
        }
      out.push_back(center_lift(paillier::gamma_dlog(acc, n_), n_));
    }
    return out;
  }

  bool well_formed(const Contribution& c) const override {
    return c.agent < dims_.agents && detail::is_group_element(c, n2_, dims_.cols[c.agent]);
  }

  CostPrediction predicted(std::size_t agent) const override {
    return predict_costs(id(), dims_.agents, dims_.cols[agent], dims_.rows, 1);
  }

  std::size_t share_width(std::size_t agent) const override { return dims_.cols[agent]; }

 protected:
  bool one_time() const override { return true; }

  void do_setup(RandomSource& rng) override {
    n_ = cfg_.keys ? cfg_.keys->public_key().n() : gen_modulus(cfg_.kappa, rng).n;
    n2_ = n_ * n_;
    hash_ = HashSpec{cfg_.hash_tag, n2_, cfg_.hash_stub};
    check_capacity(n_);
    const auto range = shares::ShareRange::integers(n2_, n_);
    StepShares sh;
    for (std::size_t i = 0; i < dims_.agents; ++i) {
      Vector s(dims_.cols[i]);
      for (auto& v : s) v = range.sample(rng);
      sh.agent.push_back(std::move(s));
    }
    sh.aggregator.assign(dims_.rows, 0);  // filled by init_weights
    shares_[0] = std::move(sh);
  }

 private:
  BigInt n_, n2_;
  HashSpec hash_;
  Weights w_;  // lifted mod N
};

// ---------------------------------------------------------------------------
// pwsah: hidden weights, one ciphertext per row

class Pwsah : public Scheme {
 public:
  SchemeId id() const override { return SchemeId::kPwsah; }
  const paillier::KeyPair& keys() const { return *keys_; }
  const paillier::PublicKey& pk() const { return keys_->public_key(); }

  /// E(W~_i^[kj]) with fresh randomness per entry.
  void init_weights(const Weights& w, RandomSource& rng) override {
    check_weights(w);
    enc_w_.assign(dims_.agents, {});
    for (std::size_t i = 0; i < dims_.agents; ++i) {
      enc_w_[i].assign(dims_.rows, {});
      for (std::size_t k = 0; k < dims_.rows; ++k)
        for (std::size_t j = 0; j < dims_.cols[i]; ++j) enc_w_[i][k].push_back(pk().encrypt_signed(w[i](k, j), rng));
    }
  }

  /// Encrypted weights as handed to agent i; [row][col].
  const std::vector<std::vector<paillier::Ciphertext>>& encrypted_weights(std::size_t agent) const {
    return enc_w_.at(agent);
  }

  Contribution encrypt(std::size_t agent, std::uint64_t t, const Vector& x, RandomSource& rng) const override {
    check_input(agent, x);
    require(!enc_w_.empty(), Errc::kInvalidArgument, "weights not initialised");
    const Vector& s = shares_at(t).agent[agent];
    const auto& ew = enc_w_[agent];
    Contribution c{static_cast<std::uint32_t>(agent), t, PayloadKind::kCiphertext,
                   static_cast<std::uint32_t>(pk().ciphertext_bytes()), pk().fingerprint(), {}};
    for (std::size_t k = 0; k < dims_.rows; ++k) {
      paillier::Ciphertext acc = pk().scale(ew[k][0], x[0]);
      for (std::size_t j = 1; j < x.size(); ++j) acc = pk().add(acc, pk().scale(ew[k][j], x[j]));
      c.values.push_back(pk().add_plaintext(acc, s[k], rng).value);
    }
    return c;
  }

  Vector aggregate(std::uint64_t t, const std::vector<Contribution>& cs) const override {
    auto by_agent = collect(t, cs);
    const StepShares& sh = shares_at(t);
    const BigInt& n = pk().n();
    Vector out;
    for (std::size_t k = 0; k < dims_.rows; ++k) {
      paillier::Ciphertext acc{by_agent[0]->values[k], pk().fingerprint()};
      for (std::size_t i = 1; i < by_agent.size(); ++i) acc = pk().add(acc, {by_agent[i]->values[k], pk().fingerprint()});
      out.push_back(center_lift(mod(keys_->decrypt(acc) + sh.aggregator[k], n), n));
    }
    return out;
  }

  bool well_formed(const Contribution& c) const override { return detail::is_ciphertext_list(c, pk(), dims_.rows); }

  CostPrediction predicted(std::size_t agent) const override {
    return predict_costs(id(), dims_.agents, dims_.cols[agent], dims_.rows, 1, cfg_.fmt.l(), cfg_.lambda);
  }

  std::size_t share_width(std::size_t) const override { return dims_.rows; }
  BigInt share_modulus() const override { return unit_masks() ? pk().n() : BigInt(0); }

  /// Units mod N for the scalar form, statistical masks for vectors.
  bool unit_masks() const {
    if (cfg_.masks == SchemeConfig::Masks::kAuto) return dims_.rows == 1 && dims_.max_cols() == 1;
    return cfg_.masks == SchemeConfig::Masks::kUnits;
  }

 protected:
  void do_setup(RandomSource& rng) override {
    keys_ = detail::keys_for(cfg_, rng);
    const BigInt& n = pk().n();
    check_capacity(n);
    shares::ShareRange range;
    if (unit_masks()) {
      range = shares::ShareRange::mod_q(n, true);
    } else {
      range = shares::ShareRange::statistical(cfg_.fmt.l(), cfg_.lambda);
      if (cfg_.check_capacity && range.bound >= n) fail(Errc::kOverflowGuard, "statistical masks exceed N");
    }
    for (std::uint64_t t = 0; t < cfg_.horizon; ++t)
      shares_[t] = from_component_sets(shares::dealer_vector_shares(dims_.agents, dims_.rows, range, t, rng),
                                       dims_.agents);
  }

 private:
  std::shared_ptr<const paillier::KeyPair> keys_;
  std::vector<std::vector<std::vector<paillier::Ciphertext>>> enc_w_;  // [agent][row][col]
};

// ---------------------------------------------------------------------------
// pwsah*: hidden weights, rows packed into slots
//
// Slot k of agent i's plaintext before decryption:
//   sum_c (W^[kc] + 2^g)(x^[c] + 2^g) + s^[k] + 2^g z^[k]
// = sum_c W^[kc] x^[c] + s^[k]  (mod 2^g)
// The noise z hides the 2^g * sum_c (W^[kc] + x^[c]) cross term.

class PwsahPacked : public Scheme {
 public:
  SchemeId id() const override { return SchemeId::kPwsahPacked; }
  const paillier::KeyPair& keys() const { return *keys_; }
  const paillier::PublicKey& pk() const { return keys_->public_key(); }
  const BitBudget& budget() const { return budget_; }
  const std::vector<RowGroup>& groups() const { return groups_; }

  /// Bits of the per-slot noise z for an agent with n_i inputs.
  unsigned noise_bits(std::size_t n_i) const { return cfg_.fmt.l() + 1 + cfg_.lambda + ceil_log2(n_i); }

  /// Largest slot value after aggregation; must stay below 2^delta.
  BigInt worst_slot() const {
    const BigInt g = pow2(budget_.gamma);
    const BigInt side = g + pow2(cfg_.fmt.l() - 1);
    BigInt worst = 0;
    for (std::size_t i = 0; i < dims_.agents; ++i)
      worst += BigInt(static_cast<unsigned long>(dims_.cols[i])) * side * side + (g - 1) +
               g * (pow2(noise_bits(dims_.cols[i])) - 1);
    return worst;
  }

  void init_weights(const Weights& w, RandomSource& rng) override {
    check_weights(w);
    enc_cols_.assign(dims_.agents, {});
    for (std::size_t i = 0; i < dims_.agents; ++i)
      for (const auto& cols : column_pack_matrix(w[i], budget_.gamma, budget_.delta, budget_.m)) {
        std::vector<paillier::Ciphertext> enc;
        for (const auto& p : cols) enc.push_back(pk().encrypt(p, rng));
        enc_cols_[i].push_back(std::move(enc));
      }
  }

  const std::vector<std::vector<paillier::Ciphertext>>& encrypted_columns(std::size_t agent) const {
    return enc_cols_.at(agent);
  }

  Contribution encrypt(std::size_t agent, std::uint64_t t, const Vector& x, RandomSource& rng) const override {
    check_input(agent, x);
    require(!enc_cols_.empty(), Errc::kInvalidArgument, "weights not initialised");
    const Vector& s = shares_at(t).agent[agent];
    const BigInt g = pow2(budget_.gamma);
    const BigInt z_top = pow2(noise_bits(x.size())) - 1;
    Contribution c{static_cast<std::uint32_t>(agent), t, PayloadKind::kCiphertext,
                   static_cast<std::uint32_t>(pk().ciphertext_bytes()), pk().fingerprint(), {}};
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
      const auto& cols = enc_cols_[agent][gi];
      paillier::Ciphertext acc = pk().scale(cols[0], x[0] + g);
      for (std::size_t j = 1; j < x.size(); ++j) acc = pk().add(acc, pk().scale(cols[j], x[j] + g));
      Vector zeta;
      for (std::size_t k = groups_[gi].begin; k < groups_[gi].end; ++k) zeta.push_back(s[k] + g * rng.between(1, z_top));
      c.values.push_back(pk().add_plaintext(acc, pack(zeta, budget_.delta), rng).value);
    }
    return c;
  }

  /// Decrypt, split slots, add s_a^[k] per slot, reduce mod 2^gamma.
  Vector aggregate(std::uint64_t t, const std::vector<Contribution>& cs) const override {
    auto by_agent = collect(t, cs);
    const StepShares& sh = shares_at(t);
    const BigInt g = pow2(budget_.gamma);
    Vector out;
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
      paillier::Ciphertext acc{by_agent[0]->values[gi], pk().fingerprint()};
      for (std::size_t i = 1; i < by_agent.size(); ++i) acc = pk().add(acc, {by_agent[i]->values[gi], pk().fingerprint()});
      const Vector slots = unpack(keys_->decrypt(acc), budget_.delta, groups_[gi].size());
      for (std::size_t r = 0; r < slots.size(); ++r)
        out.push_back(center_lift(mod(slots[r] + sh.aggregator[groups_[gi].begin + r], g), g));
    }
    return out;
  }

  bool well_formed(const Contribution& c) const override {
    return detail::is_ciphertext_list(c, pk(), groups_.size());
  }

  CostPrediction predicted(std::size_t agent) const override {
    return predict_costs(id(), dims_.agents, dims_.cols[agent], dims_.rows, budget_.m, cfg_.fmt.l(), cfg_.lambda);
  }

  std::size_t share_width(std::size_t) const override { return dims_.rows; }
  BigInt share_modulus() const override { return pow2(budget_.gamma); }

 protected:
  void do_setup(RandomSource& rng) override {
    keys_ = detail::keys_for(cfg_, rng);
    const std::size_t bits = pk().plaintext_bits();
    budget_ = cfg_.budget ? *cfg_.budget
                          : bit_budget(cfg_.fmt.l(), cfg_.lambda, dims_.max_cols(), dims_.agents, bits);
    if (budget_.m == 0 || budget_.m * budget_.delta >= bits) fail(Errc::kSlotOverflow, "pwsah*: no slot fits N");
    if (worst_slot() >= pow2(budget_.delta)) fail(Errc::kSlotOverflow, "pwsah*: slot budget too small");
    if (cfg_.check_capacity && aggregate_bits() >= budget_.gamma)
      fail(Errc::kOverflowGuard, "pwsah*: gamma too small for the aggregate range");
    groups_ = row_groups(dims_.rows, budget_.m);
    const auto range = shares::ShareRange::slot_wise(budget_.gamma);
    for (std::uint64_t t = 0; t < cfg_.horizon; ++t)
      shares_[t] = from_component_sets(shares::dealer_vector_shares(dims_.agents, dims_.rows, range, t, rng),
                                       dims_.agents);
  }

 private:
  std::shared_ptr<const paillier::KeyPair> keys_;
  BitBudget budget_;
  std::vector<RowGroup> groups_;
  std::vector<std::vector<std::vector<paillier::Ciphertext>>> enc_cols_;  // [agent][group][col]
};

inline std::unique_ptr<Scheme> make_scheme(SchemeId id) {
  switch (id) {
    case SchemeId::kPsa1: return std::make_unique<Psa1>();
    case SchemeId::kPsa2: return std::make_unique<Psa2>();
    case SchemeId::kPwsac: return std::make_unique<Pwsac>();
    case SchemeId::kPwsah: return std::make_unique<Pwsah>();
    case SchemeId::kPwsahPacked: return std::make_unique<PwsahPacked>();
  }
  fail(Errc::kInvalidArgument, "unknown scheme id");
}

// ---------------------------------------------------------------------------
// Running on the simulator

/// One aggregation inside a network step.
struct Session {
  const Scheme* scheme = nullptr;
  sim::ParticipantId aggregator = sim::kAggregator;
  std::vector<sim::ParticipantId> contributors;  // agent index -> participant
  Inputs inputs;

  Vector result;                      // filled by run_sessions
  std::vector<Contribution> received;
};

/// Round 1: contributors encrypt and send. Round 2: aggregators aggregate.
/// Message kinds are "contrib/<session>".
inline void run_sessions(sim::Network& net, std::vector<Session>& sessions, std::uint64_t t, RandomSource& rng) {
  const std::size_t participants = net.topology().participants();
  std::vector<RandomSource> rngs;
  for (sim::ParticipantId p = 0; p < participants; ++p) rngs.push_back(rng.fork(p));

  const std::size_t send_round = net.round() + 1;
  for (sim::ParticipantId p = 0; p < participants; ++p)
    net.set_handler(p, [&, p](sim::Outbox& out, const std::vector<sim::Message>& inbox) {
      const bool sending = net.round() == send_round;
      for (std::size_t s = 0; s < sessions.size(); ++s) {
        Session& ses = sessions[s];
        const std::string kind = "contrib/" + std::to_string(s);
        if (sending) {
          for (std::size_t i = 0; i < ses.contributors.size(); ++i)
            if (ses.contributors[i] == p)
              out.send(ses.aggregator, kind, ses.scheme->encrypt(i, t, ses.inputs.at(i), rngs[p]).serialize());
          continue;
        }
        if (ses.aggregator != p) continue;
        for (const auto& m : inbox)
          if (m.kind == kind) ses.received.push_back(Contribution::parse(m.payload));
        ses.result = ses.scheme->aggregate(t, ses.received);
      }
    });
  net.run_round();
  net.run_round();
  net.clear_handlers();
}

struct RunResult {
  Vector aggregate;
  Vector oracle;
  std::vector<Contribution> contributions;
  sim::SimTrace trace;

  bool matches() const { return aggregate == oracle; }
};

/// One step of a set-up scheme on a star network; agent i is participant i+1.
inline RunResult run_step(const Scheme& scheme, const Weights& w, const Inputs& x, std::uint64_t t, RandomSource& rng,
                          sim::Network* net_in = nullptr) {
  sim::Network local(sim::Topology::star(scheme.dims().agents));
  sim::Network& net = net_in ? *net_in : local;
  std::vector<Session> sessions(1);
  sessions[0].scheme = &scheme;
  sessions[0].inputs = x;
  for (std::size_t i = 0; i < scheme.dims().agents; ++i)
    sessions[0].contributors.push_back(static_cast<sim::ParticipantId>(i + 1));
  net.set_phase("online");
  run_sessions(net, sessions, t, rng);
  RunResult r;
  r.aggregate = std::move(sessions[0].result);
  r.oracle = plaintext_oracle(w, x);
  r.contributions = std::move(sessions[0].received);
  r.trace = net.trace();
  return r;
}

/// Setup and weight hand-out booked offline to participant 0, then one step.
inline RunResult run_scheme(Scheme& scheme, const Weights& w, const Inputs& x, const SchemeConfig& cfg,
                            RandomSource& rng, std::uint64_t t = 0) {
  sim::Network net(sim::Topology::star(w.size()));
  net.set_phase("offline");
  net.run_local(sim::kAggregator, [&] {
    scheme.setup(Dims::of(w), cfg, rng);
    scheme.init_weights(w, rng);
  });
  return run_step(scheme, w, x, t, rng, &net);
}

// ---------------------------------------------------------------------------
// Obliviousness game harness (functional checks only)

struct GameBranch {
  Weights w;
  Inputs x;
};

struct AdversaryScript {
  bool aggregator_compromised = false;
  std::vector<std::size_t> compromised_agents;  // 0-based
  std::vector<Inputs> encryption_queries;       // answered at t = 0, 1, ...
  GameBranch challenge[2];
};

struct GameReport {
  bool well_formed = false;
  std::optional<bool> outputs_equal;  // set when the aggregator is compromised
  std::array<Vector, 2> outputs;
  std::array<std::vector<Contribution>, 2> transcripts;
};

/// Runs both challenge branches on one set-up instance. The challenge is
/// rejected when a compromised agent's data differs between branches, or,
/// with a compromised aggregator, when the two weighted sums differ.
inline GameReport run_obliviousness_game(SchemeId id, const AdversaryScript& script, SchemeConfig cfg,
                                         RandomSource& rng) {
  const GameBranch& b0 = script.challenge[0];
  const GameBranch& b1 = script.challenge[1];
  const Dims dims = Dims::of(b0.w);
  const Dims dims1 = Dims::of(b1.w);
  if (dims.cols != dims1.cols || dims.rows != dims1.rows) fail(Errc::kChallengeRejected, "branches differ in shape");
  for (std::size_t i : script.compromised_agents) {
    require(i < dims.agents, Errc::kUnknownParticipant, "compromised agent out of range");
    if (!(b0.w[i] == b1.w[i]) || b0.x.at(i) != b1.x.at(i))
      fail(Errc::kChallengeRejected, "compromised agent " + std::to_string(i + 1) + " differs between branches");
  }
  if (script.aggregator_compromised && plaintext_oracle(b0.w, b0.x) != plaintext_oracle(b1.w, b1.x))
    fail(Errc::kChallengeRejected, "weighted sums differ under a compromised aggregator");

  const std::uint64_t challenge_t = script.encryption_queries.size();
  cfg.horizon = std::max<std::uint64_t>(cfg.horizon, challenge_t + 1);
  auto scheme = make_scheme(id);
  scheme->setup(dims, cfg, rng);

  GameReport report;
  report.well_formed = true;
  for (int b = 0; b < 2; ++b) {
    const GameBranch& br = script.challenge[b];
    scheme->init_weights(br.w, rng);
    for (std::uint64_t q = 0; q < challenge_t; ++q)
      for (std::size_t i = 0; i < dims.agents; ++i) {
        Contribution c = scheme->encrypt(i, q, script.encryption_queries[q].at(i), rng);
        report.well_formed = report.well_formed && scheme->well_formed(c);
      }
    for (std::size_t i = 0; i < dims.agents; ++i) {
      Contribution c = scheme->encrypt(i, challenge_t, br.x.at(i), rng);
      report.well_formed = report.well_formed && scheme->well_formed(c) &&
                           c.values.size() == scheme->predicted(i).ciphertexts_sent;
      report.transcripts[b].push_back(std::move(c));
    }
    report.outputs[b] = scheme->aggregate(challenge_t, report.transcripts[b]);
  }
  if (script.aggregator_compromised) report.outputs_equal = report.outputs[0] == report.outputs[1];
  return report;
}

}  // namespace privagg::schemes
