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

// Arbitrary-precision helpers on top of GMP: randomness, primality, modulus
// generation, signed modular exponentiation and the big-integer wire format.

#pragma once

#include <gmpxx.h>
#include <openssl/rand.h>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "privagg/error.hpp"
#include "privagg/symmetric.hpp"

namespace privagg {

using BigInt = mpz_class;

inline std::size_t bit_length(const BigInt& x) { return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2); }

inline BigInt pow2(std::size_t e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

inline BigInt gcd(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

/// Least nonnegative residue of `a` mod `m` (m > 0), for any sign of `a`.
inline BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

/// Floor division for a positive divisor.
inline BigInt floor_div(const BigInt& a, const BigInt& d) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t());
  return q;
}

inline std::optional<BigInt> mod_inverse(const BigInt& a, const BigInt& m) {
  BigInt r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) return std::nullopt;
  return r;
}

/// ceil(log2(n)) for n >= 1; 0 for n <= 1.
constexpr unsigned ceil_log2(std::uint64_t n) {
  unsigned bits = 0;
  while (bits < 64 && (std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

inline std::int64_t to_int64(const BigInt& x) {
  if (!x.fits_slong_p()) fail(Errc::kOutOfRange, "value does not fit in 64 bits");
  return x.get_si();
}

inline BigInt from_int64(std::int64_t v) {
  BigInt r;
  mpz_set_si(r.get_mpz_t(), v);
  return r;
}

// ---------------------------------------------------------------------------
// Operation accounting. Protocol code reports its modular work here; the
// simulator installs a sink around each participant handler.

struct OpCounters {
  std::uint64_t exps = 0;
  std::uint64_t mults = 0;
  std::uint64_t encs = 0;
  std::uint64_t decs = 0;

  OpCounters& operator+=(const OpCounters& o) {
    exps += o.exps;
    mults += o.mults;
    encs += o.encs;
    decs += o.decs;
    return *this;
  }
  friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

namespace detail {
inline thread_local OpCounters* active_counters = nullptr;
}

/// Routes counter increments on this thread to `sink` for the scope lifetime.
class CountingScope {
 public:
  explicit CountingScope(OpCounters& sink) : previous_(detail::active_counters) { detail::active_counters = &sink; }
  ~CountingScope() { detail::active_counters = previous_; }
  CountingScope(const CountingScope&) = delete;
  CountingScope& operator=(const CountingScope&) = delete;

 private:
  OpCounters* previous_;
};

inline void count_exp() {
  if (detail::active_counters) ++detail::active_counters->exps;
}
inline void count_mult() {
  if (detail::active_counters) ++detail::active_counters->mults;
}
inline void count_enc() {
  if (detail::active_counters) ++detail::active_counters->encs;
}
inline void count_dec() {
  if (detail::active_counters) ++detail::active_counters->decs;
}

// ---------------------------------------------------------------------------
// Randomness

/// Byte stream source. The deterministic kind is SHA-256 in counter mode over
/// the seed, so identical seeds replay identical streams; the cryptographic
/// kind draws from the OpenSSL CSPRNG. Instances are single-owner.
class RandomSource {
 public:
  enum class Kind { kCryptographic, kDeterministicTest };

  using result_type = std::uint64_t;

  static RandomSource cryptographic() { return RandomSource(Kind::kCryptographic, {}); }

  static RandomSource deterministic(std::span<const std::uint8_t> seed) {
    return RandomSource(Kind::kDeterministicTest, Bytes(seed.begin(), seed.end()));
  }

  static RandomSource deterministic(std::uint64_t seed) {
    Bytes s;
    append_be64(s, seed);
    return deterministic(s);
  }

  Kind kind() const { return kind_; }
  const Bytes& seed() const { return seed_; }

  /// Independent child stream labelled by `label`; deterministic when this
  /// source is.
  RandomSource fork(std::uint64_t label) {
    if (kind_ == Kind::kCryptographic) return cryptographic();
    Bytes s = seed_;
    s.push_back(0xF0);
    append_be64(s, label);
    append_be64(s, uint64());
    return deterministic(s);
  }

  void fill(std::span<std::uint8_t> out) {
    if (kind_ == Kind::kCryptographic) {
      if (!out.empty() && RAND_bytes(out.data(), static_cast<int>(out.size())) != 1)
        fail(Errc::kInvalidArgument, "RAND_bytes failed");
      return;
    }
    for (auto& b : out) {
      if (pos_ == buffer_.size()) refill();
      b = buffer_[pos_++];
    }
  }

  std::uint64_t uint64() {
    std::array<std::uint8_t, 8> b{};
    fill(b);
    return read_be(b);
  }

  // UniformRandomBitGenerator
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return uint64(); }

  /// Uniform integer in [0, 2^bits).
  BigInt bits(std::size_t nbits) {
    if (nbits == 0) return 0;
    Bytes buf((nbits + 7) / 8);
    fill(buf);
    const std::size_t excess = buf.size() * 8 - nbits;
    buf[0] &= static_cast<std::uint8_t>(0xFF >> excess);
    BigInt r;
    mpz_import(r.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
    return r;
  }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  BigInt below(const BigInt& bound) {
    require(bound > 0, Errc::kInvalidArgument, "below(): bound must be positive");
    const std::size_t nbits = bit_length(bound - 1);
    for (;;) {
      BigInt r = bits(nbits);
      if (r < bound) return r;
    }
  }

  /// Uniform integer in [lo, hi], lo <= hi.
  BigInt between(const BigInt& lo, const BigInt& hi) {
    require(lo <= hi, Errc::kInvalidArgument, "between(): empty range");
    BigInt span = hi - lo + 1;
    return lo + below(span);
  }

  std::uint64_t below_u64(std::uint64_t bound) {
    require(bound > 0, Errc::kInvalidArgument, "below_u64(): bound must be positive");
    return static_cast<std::uint64_t>(below(BigInt(static_cast<unsigned long>(bound))).get_ui());
  }

  /// Uniform double in [0, 1).
  double unit_double() { return static_cast<double>(uint64() >> 11) * 0x1.0p-53; }

 private:
  RandomSource(Kind kind, Bytes seed) : kind_(kind), seed_(std::move(seed)) {}

  void refill() {
    Bytes block = seed_;
    append_be64(block, counter_++);
    auto d = sha256(block);
    buffer_.assign(d.begin(), d.end());
    pos_ = 0;
  }

  Kind kind_;
  Bytes seed_;
  Bytes buffer_;
  std::size_t pos_ = 0;
  std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Modular arithmetic

/// base^exp mod modulus with signed exponents; negative exponents go through
/// the modular inverse of base.
inline BigInt mod_pow_signed(const BigInt& base, const BigInt& exp, const BigInt& modulus) {
  require(modulus > 0, Errc::kInvalidArgument, "mod_pow_signed: modulus must be positive");
  count_exp();
  BigInt r;
  if (exp >= 0) {
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), modulus.get_mpz_t());
    return r;
  }
  auto inv = mod_inverse(mod(base, modulus), modulus);
  if (!inv) fail(Errc::kNotInvertible, "mod_pow_signed: negative exponent on non-unit base");
  BigInt e = -exp;
  mpz_powm(r.get_mpz_t(), inv->get_mpz_t(), e.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

inline bool is_unit(const BigInt& x, const BigInt& modulus) { return gcd(mod(x, modulus), modulus) == 1; }

/// Uniform element of (Z/modulus Z)^* by rejection on gcd.
inline BigInt sample_unit(const BigInt& modulus, RandomSource& rng) {
  require(modulus >= 2, Errc::kInvalidArgument, "sample_unit: modulus must be >= 2");
  for (;;) {
    BigInt candidate = rng.below(modulus);
    if (candidate != 0 && is_unit(candidate, modulus)) return candidate;
  }
}

// ---------------------------------------------------------------------------
// Primes

constexpr unsigned kMillerRabinRounds = 40;
constexpr std::uint64_t kTrialDivisionLimit = 1u << 16;

namespace detail {
inline const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> primes = [] {
    std::vector<bool> sieve(kTrialDivisionLimit, true);
    std::vector<unsigned> out;
    for (unsigned i = 2; i < kTrialDivisionLimit; ++i) {
      if (!sieve[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = std::uint64_t{i} * i; j < kTrialDivisionLimit; j += i) sieve[j] = false;
    }
    return out;
  }();
  return primes;
}

inline bool miller_rabin_round(const BigInt& n, const BigInt& d, std::size_t s, const BigInt& a) {
  BigInt x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  const BigInt n_minus_1 = n - 1;
  if (x == 1 || x == n_minus_1) return true;
  for (std::size_t r = 1; r < s; ++r) {
    x = x * x % n;
    if (x == n_minus_1) return true;
  }
  return false;
}
}  // namespace detail

/// Exact for n < 2^16 (trial division); Miller-Rabin with `rounds` random
/// bases above that.
inline bool is_probable_prime(const BigInt& n, RandomSource& rng, unsigned rounds = kMillerRabinRounds) {
  if (n < 2) return false;
  const auto& primes = detail::small_primes();
  if (n < kTrialDivisionLimit) {
    const unsigned v = static_cast<unsigned>(n.get_ui());
    return std::binary_search(primes.begin(), primes.end(), v);
  }
  // Cheap filter before the expensive rounds.
  for (std::size_t i = 0; i < std::min<std::size_t>(primes.size(), 2000); ++i)
    if (mpz_divisible_ui_p(n.get_mpz_t(), primes[i])) return false;
  BigInt d = n - 1;
  std::size_t s = 0;
  while (mpz_even_p(d.get_mpz_t())) {
    d >>= 1;
    ++s;
  }
  const BigInt upper = n - 2;
  for (unsigned i = 0; i < rounds; ++i) {
    BigInt a = rng.between(2, upper);
    if (!detail::miller_rabin_round(n, d, s, a)) return false;
  }
  return true;
}

/// Random prime with exactly `bits` bits.
inline BigInt random_prime(std::size_t bits, RandomSource& rng) {
  require(bits >= 2, Errc::kInvalidArgument, "random_prime: need at least 2 bits");
  for (;;) {
    BigInt c = rng.bits(bits);
    mpz_setbit(c.get_mpz_t(), bits - 1);
    if (bits > 2) mpz_setbit(c.get_mpz_t(), 0);
    if (is_probable_prime(c, rng)) return c;
  }
}

// ---------------------------------------------------------------------------
// RSA-type moduli

struct PrimeFactors {
  BigInt p;
  BigInt q;
};

/// N = pq with both factors prime, of equal bit-length and gcd(phi(N), N) = 1.
/// `bit_length` is the number of bits of N.
struct BigModulus {
  BigInt n;
  std::size_t bit_length = 0;
  std::optional<PrimeFactors> factors;

  BigInt totient() const {
    require(factors.has_value(), Errc::kInvalidArgument, "totient requires the factorization");
    return (factors->p - 1) * (factors->q - 1);
  }
};

enum class PairVerdict { kAccepted, kNotPrime, kEqualPrimes, kUnequalLength, kWrongSize, kTotientShared };

/// Validates a candidate prime pair for a modulus of `kappa` bits
/// (kappa = 0 skips the size check).
inline PairVerdict check_prime_pair(const BigInt& p, const BigInt& q, std::size_t kappa, RandomSource& rng) {
  if (!is_probable_prime(p, rng) || !is_probable_prime(q, rng)) return PairVerdict::kNotPrime;
  if (p == q) return PairVerdict::kEqualPrimes;
  const BigInt n = p * q;
  if (gcd((p - 1) * (q - 1), n) != 1) return PairVerdict::kTotientShared;
  if (bit_length(p) != bit_length(q)) return PairVerdict::kUnequalLength;
  if (kappa != 0 && privagg::bit_length(n) != kappa) return PairVerdict::kWrongSize;
  return PairVerdict::kAccepted;
}

using PrimeSource = std::function<BigInt(std::size_t bits)>;

constexpr unsigned kModulusRetries = 256;

/// Generates N with exactly `kappa` bits from primes drawn by `next_prime`.
/// Throws kPrimeSearchExhausted when no valid pair appears within the retry
/// budget, which for tiny or odd kappa usually means none exists.
inline BigModulus gen_modulus(std::size_t kappa, RandomSource& rng, const PrimeSource& next_prime,
                              unsigned retries = kModulusRetries) {
  require(kappa >= 6, Errc::kInvalidArgument, "gen_modulus: kappa must be >= 6");
  const std::size_t half = (kappa + 1) / 2;
  for (unsigned attempt = 0; attempt < retries; ++attempt) {
    BigInt p = next_prime(half);
    BigInt q = next_prime(half);
    if (check_prime_pair(p, q, kappa, rng) != PairVerdict::kAccepted) continue;
    if (p > q) std::swap(p, q);
    BigModulus out{p * q, kappa, PrimeFactors{p, q}};
    return out;
  }
  fail(Errc::kPrimeSearchExhausted, "no valid prime pair for kappa=" + std::to_string(kappa));
}

inline BigModulus gen_modulus(std::size_t kappa, RandomSource& rng) {
  return gen_modulus(kappa, rng, [&rng](std::size_t bits) { return random_prime(bits, rng); });
}

// ---------------------------------------------------------------------------
// Wire format: be32 magnitude length | sign byte (0 nonneg, 1 neg) | magnitude

inline void append_bigint(Bytes& out, const BigInt& v) {
  const BigInt mag = abs(v);
  std::size_t count = 0;
  Bytes magnitude((bit_length(mag) + 7) / 8);
  if (!magnitude.empty()) mpz_export(magnitude.data(), &count, 1, 1, 1, 0, mag.get_mpz_t());
  append_be32(out, static_cast<std::uint32_t>(magnitude.size()));
  out.push_back(v < 0 ? 0x01 : 0x00);
  out.insert(out.end(), magnitude.begin(), magnitude.end());
}

inline Bytes encode_bigint(const BigInt& v) {
  Bytes out;
  append_bigint(out, v);
  return out;
}

/// Parses one encoded integer starting at `offset`, advancing it.
inline BigInt read_bigint(std::span<const std::uint8_t> in, std::size_t& offset) {
  if (in.size() < offset + 5) fail(Errc::kInvalidArgument, "truncated big-integer header");
  const std::size_t len = static_cast<std::size_t>(read_be(in.subspan(offset, 4)));
  const std::uint8_t sign = in[offset + 4];
  if (sign > 1) fail(Errc::kInvalidArgument, "bad big-integer sign byte");
  if (in.size() < offset + 5 + len) fail(Errc::kInvalidArgument, "truncated big-integer magnitude");
  BigInt v = 0;
  if (len > 0) mpz_import(v.get_mpz_t(), len, 1, 1, 1, 0, in.data() + offset + 5);
  if (sign == 1) v = -v;
  offset += 5 + len;
  return v;
}

inline BigInt decode_bigint(std::span<const std::uint8_t> in) {
  std::size_t offset = 0;
  BigInt v = read_bigint(in, offset);
  if (offset != in.size()) fail(Errc::kInvalidArgument, "trailing bytes after big integer");
  return v;
}

/// Fixed-width big-endian magnitude (no header), left padded with zeros.
inline Bytes to_fixed_bytes(const BigInt& v, std::size_t width) {
  require(v >= 0 && bit_length(v) <= width * 8, Errc::kOutOfRange, "value too wide for fixed encoding");
  Bytes out(width, 0);
  std::size_t count = 0;
  Bytes tmp((bit_length(v) + 7) / 8);
  if (!tmp.empty()) mpz_export(tmp.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
  std::copy(tmp.begin(), tmp.end(), out.end() - static_cast<std::ptrdiff_t>(tmp.size()));
  return out;
}

/// Big-endian unsigned magnitude.
inline BigInt from_bytes(std::span<const std::uint8_t> in) {
  BigInt v = 0;
  if (!in.empty()) mpz_import(v.get_mpz_t(), in.size(), 1, 1, 1, 0, in.data());
  return v;
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xF]);
  }
  return s;
}

}  // namespace privagg
