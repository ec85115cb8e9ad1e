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

// Fixed-point codecs, signed liftings, slot packing and the bit budget for
// packed schemes.
//
// A rational x becomes the signed integer round(x * 2^l_f) in l = l_i + l_f
// bits. Packed plaintexts hold m slots of delta bits each:
//
//   P = v_0 + v_1 2^delta + ... + v_{m-1} 2^{(m-1) delta}
//
// Signed values enter a slot either with the offset 2^gamma or as residues
// modulo the slot ring.

#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "privagg/numeric.hpp"

namespace privagg {

/// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      require(row.size() == cols_, Errc::kInvalidArgument, "ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
std::vector<T> matvec(const Matrix<T>& a, const std::vector<T>& x) {
  require(a.cols() == x.size(), Errc::kInvalidArgument, "matvec: dimension mismatch");
  std::vector<T> y(a.rows(), T{});
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) y[r] += a(r, c) * x[c];
  return y;
}

// ---------------------------------------------------------------------------
// Fixed point

struct FixedFormat {
  unsigned l_i = 16;
  unsigned l_f = 16;
  unsigned l() const { return l_i + l_f; }
};

inline void check_fixed_range(const BigInt& raw, const FixedFormat& fmt) {
  const BigInt half = pow2(fmt.l() - 1);
  if (raw < -half || raw >= half) fail(Errc::kOutOfRange, "fixed-point value exceeds the l-bit signed range");
}

/// round(x * 2^l_f), ties away from zero.
inline BigInt encode_fixed(const mpq_class& x, const FixedFormat& fmt) {
  mpq_class scaled = x * mpq_class(pow2(fmt.l_f));
  scaled.canonicalize();
  BigInt twice_num = 2 * BigInt(abs(scaled.get_num()));
  const BigInt& den = scaled.get_den();
  // floor((2|num| + den) / 2den) = round-half-up of |num|/den
  BigInt mag = BigInt(twice_num + den) / BigInt(2 * den);
  BigInt raw = sgn(scaled) < 0 ? BigInt(-mag) : mag;
  check_fixed_range(raw, fmt);
  return raw;
}

inline BigInt encode_fixed(double x, const FixedFormat& fmt) {
  if (!std::isfinite(x)) fail(Errc::kOutOfRange, "encode_fixed: non-finite input");
  return encode_fixed(mpq_class(x), fmt);
}

/// raw / 2^{scale_power * l_f}, exact.
inline mpq_class decode_fixed_exact(const BigInt& raw, unsigned l_f, unsigned scale_power = 1) {
  mpq_class q(raw, pow2(static_cast<std::size_t>(scale_power) * l_f));
  q.canonicalize();
  return q;
}

inline double decode_fixed(const BigInt& raw, unsigned l_f, unsigned scale_power = 1) {
  return decode_fixed_exact(raw, l_f, scale_power).get_d();
}

/// v / 2^bits rounded to nearest, ties away from zero.
inline BigInt round_shift(const BigInt& v, unsigned bits) {
  if (bits == 0) return v;
  BigInt mag = abs(v) + pow2(bits - 1);
  mag >>= bits;
  return v < 0 ? BigInt(-mag) : mag;
}

/// Re-rounds a product carrying 2 l_f fractional bits back to l_f bits.
inline BigInt rescale_product(const BigInt& raw2, unsigned l_f) { return round_shift(raw2, l_f); }

// ---------------------------------------------------------------------------
// Liftings

inline BigInt lift_offset(const BigInt& y, unsigned gamma) {
  const BigInt off = pow2(gamma);
  if (abs(y) >= off) fail(Errc::kOutOfRange, "lift_offset: |y| >= 2^gamma");
  return y + off;
}

inline BigInt lift_mod(const BigInt& y, const BigInt& modulus) { return mod(y, modulus); }

/// Maps residues in [ceil(modulus/2), modulus) to negatives.
inline BigInt center_lift(const BigInt& y, const BigInt& modulus) {
  BigInt r = mod(y, modulus);
  if (2 * r >= modulus) r -= modulus;
  return r;
}

/// Removes `count` offsets of 2^gamma. With `center`, the result is further
/// reduced mod 2^gamma and center-lifted.
inline BigInt drop_offset(const BigInt& y, unsigned gamma, std::size_t count = 1, bool center = false) {
  BigInt v = y - BigInt(pow2(gamma) * static_cast<unsigned long>(count));
  if (center) v = center_lift(v, pow2(gamma));
  return v;
}

// ---------------------------------------------------------------------------
// Packing

inline BigInt pack(const std::vector<BigInt>& values, unsigned delta) {
  const BigInt cap = pow2(delta);
  BigInt p = 0;
  for (std::size_t j = values.size(); j-- > 0;) {
    if (values[j] < 0 || values[j] >= cap) fail(Errc::kSlotOverflow, "pack: value does not fit a slot");
    p <<= delta;
    p += values[j];
  }
  return p;
}

inline std::vector<BigInt> unpack(const BigInt& packed, unsigned delta, std::size_t m) {
  require(packed >= 0, Errc::kInvalidArgument, "unpack: negative plaintext");
  std::vector<BigInt> out(m);
  BigInt rest = packed;
  BigInt slot;
  for (std::size_t j = 0; j < m; ++j) {
    mpz_fdiv_r_2exp(slot.get_mpz_t(), rest.get_mpz_t(), delta);
    out[j] = slot;
    rest >>= delta;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bit budget

struct BitBudget {
  unsigned gamma = 0;
  unsigned delta = 0;
  std::size_t m = 0;

  friend bool operator==(const BitBudget&, const BitBudget&) = default;
};

/// Slot sizing for the packed hidden-weight scheme: n columns per agent, M
/// agents, lambda-bit statistical masking.
inline BitBudget bit_budget(unsigned l, unsigned lambda, std::size_t n, std::size_t M, std::size_t plaintext_bits) {
  const unsigned logs = ceil_log2(n) + ceil_log2(M);
  BitBudget b;
  b.gamma = 2 * l + 1 + logs;
  b.delta = std::max(l + 2 + logs, lambda) + 3 * l + 4 + 2 * logs;
  b.m = plaintext_bits == 0 ? 0 : (plaintext_bits - 1) / b.delta;
  return b;
}

/// Slot sizing for packed unweighted sums of M offset-lifted values.
inline BitBudget sum_budget(unsigned l, std::size_t M, std::size_t plaintext_bits) {
  BitBudget b;
  b.gamma = 2 * l + 1;
  b.delta = 2 * l + 2 + ceil_log2(M);
  b.m = plaintext_bits == 0 ? 0 : (plaintext_bits - 1) / b.delta;
  return b;
}

struct EncodingParams {
  FixedFormat fmt;
  unsigned lambda = 80;
  BitBudget budget;
  std::size_t n = 1;  // max columns per agent
  std::size_t M = 1;

  unsigned l() const { return fmt.l(); }

  /// gamma > l, delta > gamma, and at least one slot of delta bits below
  /// the plaintext width.
  void validate(std::size_t plaintext_bits) const {
    if (budget.gamma <= l()) fail(Errc::kInvalidArgument, "gamma must exceed l");
    if (budget.delta <= budget.gamma) fail(Errc::kInvalidArgument, "delta must exceed gamma");
    if (budget.m == 0) fail(Errc::kSlotOverflow, "plaintext cannot hold a single slot");
    if (budget.m * budget.delta >= plaintext_bits) fail(Errc::kSlotOverflow, "m * delta reaches the plaintext width");
  }
};

inline EncodingParams make_params(FixedFormat fmt, unsigned lambda, std::size_t n, std::size_t M,
                                  std::size_t plaintext_bits) {
  EncodingParams p{fmt, lambda, bit_budget(fmt.l(), lambda, n, M, plaintext_bits), n, M};
  return p;
}

// ---------------------------------------------------------------------------
// Column packing

/// Half-open row range [begin, end) sharing one packed ciphertext.
struct RowGroup {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const RowGroup&, const RowGroup&) = default;
};

inline std::vector<RowGroup> row_groups(std::size_t rows, std::size_t m) {
  require(m > 0, Errc::kSlotOverflow, "slot capacity is zero");
  std::vector<RowGroup> out;
  for (std::size_t b = 0; b < rows; b += m) out.push_back({b, std::min(rows, b + m)});
  return out;
}

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

/// Packs every column of W (offset-lifted) into one integer per row group:
/// result[g][j] holds rows of group g of column j.
inline std::vector<std::vector<BigInt>> column_pack_matrix(const Matrix<BigInt>& w, unsigned gamma, unsigned delta,
                                                           std::size_t m) {
  std::vector<std::vector<BigInt>> out;
  for (const RowGroup& g : row_groups(w.rows(), m)) {
    std::vector<BigInt> cols(w.cols());
    for (std::size_t j = 0; j < w.cols(); ++j) {
      std::vector<BigInt> slots;
      for (std::size_t k = g.begin; k < g.end; ++k) slots.push_back(lift_offset(w(k, j), gamma));
      cols[j] = pack(slots, delta);
    }
    out.push_back(std::move(cols));
  }
  return out;
}

}  // namespace privagg
