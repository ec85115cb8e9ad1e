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

#include "privagg/numeric.hpp"

#include <deque>
#include <numeric>
#include <set>

#include "gtest/gtest.h"

namespace privagg {
namespace {

bool naive_is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

TEST(ModPowSignedTest, SmallPower) { EXPECT_EQ(mod_pow_signed(2, 5, 35), 32); }

TEST(ModPowSignedTest, NegativeExponentUsesInverse) {
  EXPECT_EQ(mod_pow_signed(2, -1, 35), 18);
  EXPECT_EQ(BigInt(2 * 18 % 35), 1);
}

TEST(ModPowSignedTest, ZeroExponentIsOne) {
  for (int x : {1, 2, 4, 34}) EXPECT_EQ(mod_pow_signed(x, 0, 35), 1);
}

TEST(ModPowSignedTest, NonInvertibleBaseWithNegativeExponentThrows) {
  try {
    mod_pow_signed(5, -1, 35);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNotInvertible);
  }
}

TEST(ModPowSignedTest, ExponentsAddForUnits) {
  auto rng = RandomSource::deterministic(11);
  const BigInt n = 35 * 35;
  for (int trial = 0; trial < 300; ++trial) {
    BigInt x = sample_unit(n, rng);
    BigInt a = rng.between(-5000, 5000);
    BigInt b = rng.between(-5000, 5000);
    EXPECT_EQ(mod_pow_signed(x, a + b, n), mod(mod_pow_signed(x, a, n) * mod_pow_signed(x, b, n), n));
  }
}

TEST(SampleUnitTest, AcceptedSetIsExactlyTheUnits) {
  // Oracle: brute-force enumeration of (Z/35Z)^*.
  std::set<long> units;
  for (long c = 1; c < 35; ++c)
    if (std::gcd(c, 35L) == 1) units.insert(c);
  ASSERT_EQ(units.size(), 24u);
  EXPECT_FALSE(is_unit(5, 35));
  EXPECT_TRUE(is_unit(12, 35));

  auto rng = RandomSource::deterministic(3);
  std::set<long> seen;
  for (int i = 0; i < 5000; ++i) seen.insert(sample_unit(35, rng).get_si());
  EXPECT_EQ(seen, units);
}

TEST(RandomSourceTest, DeterministicStreamsReplay) {
  auto a = RandomSource::deterministic(42);
  auto b = RandomSource::deterministic(42);
  Bytes x(1000), y(1000);
  a.fill(x);
  b.fill(y);
  EXPECT_EQ(x, y);
  auto c = RandomSource::deterministic(43);
  Bytes z(1000);
  c.fill(z);
  EXPECT_NE(x, z);
}

TEST(RandomSourceTest, BelowStaysInRange) {
  auto rng = RandomSource::deterministic(5);
  for (int i = 0; i < 1000; ++i) {
    BigInt v = rng.below(37);
    EXPECT_GE(v, 0);
    EXPECT_LT(v, 37);
  }
}

TEST(PrimalityTest, AgreesWithTrialDivisionAcrossTheToyBoundary) {
  auto rng = RandomSource::deterministic(9);
  for (std::uint64_t n = 0; n < 70000; n += (n < 66000 ? 7 : 1))
    ASSERT_EQ(is_probable_prime(BigInt(static_cast<unsigned long>(n)), rng), naive_is_prime(n)) << n;
}

TEST(PrimalityTest, RejectsCarmichaelNumbers) {
  auto rng = RandomSource::deterministic(1);
  for (unsigned long n : {561ul, 1105ul, 1729ul, 75361ul, 101101ul, 252601ul}) EXPECT_FALSE(is_probable_prime(n, rng));
}

TEST(GenModulusTest, ScriptedPrimesFiveAndSeven) {
  auto rng = RandomSource::deterministic(1);
  std::deque<long> script = {5, 7};
  auto source = [&](std::size_t) {
    long v = script.front();
    script.pop_front();
    return BigInt(v);
  };
  BigModulus m = gen_modulus(6, rng, source);
  EXPECT_EQ(m.n, 35);
  EXPECT_EQ(m.totient(), 24);
  EXPECT_EQ(gcd(24, 35), 1);
  EXPECT_EQ(m.bit_length, 6u);
}

TEST(GenModulusTest, PairSharingAFactorWithTotientIsRejected) {
  auto rng = RandomSource::deterministic(1);
  // phi(21) = 12 and gcd(12, 21) = 3.
  EXPECT_EQ(gcd(BigInt(12), BigInt(21)), 3);
  EXPECT_EQ(check_prime_pair(3, 7, 0, rng), PairVerdict::kTotientShared);
  EXPECT_EQ(check_prime_pair(5, 7, 6, rng), PairVerdict::kAccepted);
  EXPECT_EQ(check_prime_pair(5, 5, 0, rng), PairVerdict::kEqualPrimes);
  EXPECT_EQ(check_prime_pair(5, 9, 0, rng), PairVerdict::kNotPrime);
  EXPECT_EQ(check_prime_pair(5, 13, 0, rng), PairVerdict::kUnequalLength);
  EXPECT_EQ(check_prime_pair(5, 7, 7, rng), PairVerdict::kWrongSize);
}

TEST(GenModulusTest, ScriptedSourceSkipsRejectedPair) {
  auto rng = RandomSource::deterministic(1);
  std::deque<long> script = {3, 7, 7, 7, 5, 7};
  auto source = [&](std::size_t) {
    long v = script.front();
    script.pop_front();
    return BigInt(v);
  };
  EXPECT_EQ(gen_modulus(6, rng, source).n, 35);
  EXPECT_TRUE(script.empty());
}

TEST(GenModulusTest, ToyAndMediumSizesHaveExactBitLength) {
  auto rng = RandomSource::deterministic(77);
  for (std::size_t kappa : {6u, 8u, 16u, 64u, 256u}) {
    BigModulus m = gen_modulus(kappa, rng);
    EXPECT_EQ(bit_length(m.n), kappa);
    EXPECT_EQ(m.factors->p * m.factors->q, m.n);
    EXPECT_EQ(bit_length(m.factors->p), bit_length(m.factors->q));
    EXPECT_EQ(gcd(m.totient(), m.n), 1);
  }
}

TEST(GenModulusTest, EvaluationSizeHas2048Bits) {
  auto rng = RandomSource::deterministic(2048);
  BigModulus m = gen_modulus(2048, rng);
  EXPECT_EQ(bit_length(m.n), 2048u);
  EXPECT_EQ(gcd(m.totient(), m.n), 1);
}

TEST(GenModulusTest, ImpossibleKappaExhaustsRetries) {
  auto rng = RandomSource::deterministic(1);
  // Two distinct 4-bit primes (11, 13) always give an 8-bit product.
  try {
    gen_modulus(7, rng);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kPrimeSearchExhausted);
  }
}

TEST(BigIntEncodingTest, LayoutIsLengthSignMagnitude) {
  EXPECT_EQ(encode_bigint(0), (Bytes{0, 0, 0, 0, 0}));
  EXPECT_EQ(encode_bigint(258), (Bytes{0, 0, 0, 2, 0, 0x01, 0x02}));
  EXPECT_EQ(encode_bigint(-31), (Bytes{0, 0, 0, 1, 1, 0x1F}));
}

TEST(BigIntEncodingTest, RoundTripsSignedValues) {
  auto rng = RandomSource::deterministic(8);
  for (int i = 0; i < 500; ++i) {
    BigInt v = rng.bits(rng.below_u64(600));
    if (rng.below_u64(2) == 1) v = -v;
    EXPECT_EQ(decode_bigint(encode_bigint(v)), v);
  }
}

TEST(BigIntEncodingTest, RejectsTruncatedInput) {
  Bytes b = encode_bigint(123456789);
  b.pop_back();
  EXPECT_THROW(decode_bigint(b), Error);
}

TEST(CountingScopeTest, NestedScopesRestore) {
  OpCounters outer, inner;
  {
    CountingScope a(outer);
    count_exp();
    {
      CountingScope b(inner);
      count_exp();
      count_mult();
    }
    count_dec();
  }
  count_exp();
  EXPECT_EQ(outer, (OpCounters{1, 0, 0, 1}));
  EXPECT_EQ(inner, (OpCounters{1, 1, 0, 0}));
}

}  // namespace
}  // namespace privagg
