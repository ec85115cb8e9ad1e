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

// Paillier cryptosystem with generator g = 1 + N.
//
//   E(m; r) = (1 + mN) r^N mod N^2
//   D(c)    = L(c^phi mod N^2) * phi^-1 mod N,   L(y) = (y - 1) / N
//
// Homomorphisms: E(a)E(b) = E(a + b), E(a)^k = E(ka), all mod N.
//
// A key pair that holds the factors decrypts through CRT over p^2 and q^2;
// decrypt_plain() keeps the single-exponentiation form above. Both agree on
// every valid ciphertext.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "privagg/numeric.hpp"

namespace privagg::paillier {

using Fingerprint = std::uint64_t;

/// First 8 bytes of SHA-256 over the encoded modulus.
inline Fingerprint fingerprint_of(const BigInt& n) {
  auto digest = sha256(encode_bigint(n));
  return read_be(std::span<const std::uint8_t>(digest.data(), 8));
}

struct Ciphertext {
  BigInt value;
  Fingerprint modulus_id = 0;

  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

/// Discrete log in Gamma_N = {1 + aN mod N^2}: returns beta with
/// (1 + N)^beta = y mod N^2.
inline BigInt gamma_dlog(const BigInt& y, const BigInt& n) {
  const BigInt shifted = y - 1;
  if (!mpz_divisible_p(shifted.get_mpz_t(), n.get_mpz_t()))
    fail(Errc::kMalformedCiphertext, "gamma_dlog: y - 1 is not divisible by N");
  return mod(BigInt(shifted / n), n);
}

class PublicKey {
 public:
  PublicKey() = default;
  explicit PublicKey(BigInt n) : n_(std::move(n)), n2_(n_ * n_), fingerprint_(fingerprint_of(n_)) {}

  const BigInt& n() const { return n_; }
  const BigInt& n_squared() const { return n2_; }
  BigInt g() const { return n_ + 1; }
  Fingerprint fingerprint() const { return fingerprint_; }
  std::size_t plaintext_bits() const { return bit_length(n_); }
  /// Fixed width of a ciphertext value in bytes.
  std::size_t ciphertext_bytes() const { return (bit_length(n2_) + 7) / 8; }

  Ciphertext encrypt(const BigInt& m, const BigInt& r) const {
    if (m < 0 || m >= n_) fail(Errc::kOutOfRange, "encrypt: plaintext outside [0, N)");
    count_enc();
    BigInt rn;
    mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), n_.get_mpz_t(), n2_.get_mpz_t());
    // (1 + N)^m = 1 + mN mod N^2
    BigInt gm = (1 + m * n_) % n2_;
    return Ciphertext{gm * rn % n2_, fingerprint_};
  }

  Ciphertext encrypt(const BigInt& m, RandomSource& rng) const { return encrypt(m, sample_unit(n_, rng)); }

  /// r^N mod N^2 for a fresh unit r; the expensive half of an encryption,
  /// computable ahead of time.
  BigInt make_noise(RandomSource& rng) const {
    BigInt r = sample_unit(n_, rng);
    BigInt rn;
    mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), n_.get_mpz_t(), n2_.get_mpz_t());
    return rn;
  }

  /// Encryption with precomputed noise r^N mod N^2.
  Ciphertext encrypt_with_noise(const BigInt& m, const BigInt& noise) const {
    if (m < 0 || m >= n_) fail(Errc::kOutOfRange, "encrypt: plaintext outside [0, N)");
    count_enc();
    return Ciphertext{(1 + m * n_) % n2_ * noise % n2_, fingerprint_};
  }

  /// Encrypts a signed value through its residue mod N.
  Ciphertext encrypt_signed(const BigInt& m, RandomSource& rng) const { return encrypt(mod(m, n_), rng); }

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const {
    check(a);
    check(b);
    count_mult();
    return Ciphertext{a.value * b.value % n2_, fingerprint_};
  }

  /// E(m)^k; negative k runs through the inverse ciphertext.
  Ciphertext scale(const Ciphertext& c, const BigInt& k) const {
    check(c);
    return Ciphertext{mod_pow_signed(c.value, k, n2_), fingerprint_};
  }

  /// c * E(m) with fresh randomness: adds a plaintext and re-randomizes.
  /// Counted as one encryption.
  Ciphertext add_plaintext(const Ciphertext& c, const BigInt& m, RandomSource& rng) const {
    check(c);
    Ciphertext mask = encrypt(mod(m, n_), rng);
    return Ciphertext{c.value * mask.value % n2_, fingerprint_};
  }

  void check(const Ciphertext& c) const {
    if (c.modulus_id != fingerprint_) fail(Errc::kModulusMismatch, "ciphertext formed under a different modulus");
  }

 private:
  BigInt n_;
  BigInt n2_;
  Fingerprint fingerprint_ = 0;
};

struct SecretKey {
  BigInt phi;
  BigInt phi_inv;  // phi^-1 mod N
};

class KeyPair {
 public:
  KeyPair() = default;

  /// Builds the key pair from a modulus whose factorization is known.
  explicit KeyPair(const BigModulus& modulus) : pk_(modulus.n) {
    sk_.phi = modulus.totient();
    auto inv = mod_inverse(sk_.phi, modulus.n);
    if (!inv) fail(Errc::kNotInvertible, "phi(N) is not invertible mod N");
    sk_.phi_inv = *inv;
    if (modulus.factors) crt_ = CrtContext::make(modulus.factors->p, modulus.factors->q);
  }

  static KeyPair generate(std::size_t kappa, RandomSource& rng) { return KeyPair(gen_modulus(kappa, rng)); }

  const PublicKey& public_key() const { return pk_; }
  const SecretKey& secret_key() const { return sk_; }

  BigInt decrypt(const Ciphertext& c) const {
    validate(c);
    count_dec();
    if (!crt_) return plain(c.value);
    return crt_->decrypt(c.value);
  }

  /// r^N mod N^2 for a fresh unit r, through CRT when the factors are known.
  /// Same value as PublicKey::make_noise for the same draw.
  BigInt make_noise(RandomSource& rng) const {
    if (!crt_) return pk_.make_noise(rng);
    return crt_->noise(sample_unit(pk_.n(), rng));
  }

  /// D(c) = (c^phi mod N^2 - 1) / N * phi^-1 mod N, without CRT.
  BigInt decrypt_plain(const Ciphertext& c) const {
    validate(c);
    count_dec();
    return plain(c.value);
  }

  /// Decrypts and maps residues above N/2 to negatives.
  BigInt decrypt_signed(const Ciphertext& c) const {
    BigInt m = decrypt(c);
    if (2 * m > pk_.n()) m -= pk_.n();
    return m;
  }

 private:
  struct CrtContext {
    BigInt p, q, p2, q2, hp, hq, q_inv_p, q2_inv_p2;

    static CrtContext make(const BigInt& p, const BigInt& q) {
      CrtContext ctx{p, q, p * p, q * q, 0, 0, 0, 0};
      // With g = 1 + N: L_p(g^(p-1) mod p^2) = -q mod p, likewise for q.
      ctx.hp = *mod_inverse(mod(-q, p), p);
      ctx.hq = *mod_inverse(mod(-p, q), q);
      ctx.q_inv_p = *mod_inverse(q, p);
      ctx.q2_inv_p2 = *mod_inverse(ctx.q2, ctx.p2);
      return ctx;
    }

    static BigInt half(const BigInt& c, const BigInt& prime, const BigInt& prime2, const BigInt& h) {
      BigInt e = prime - 1, y;
      mpz_powm(y.get_mpz_t(), c.get_mpz_t(), e.get_mpz_t(), prime2.get_mpz_t());
      BigInt shifted = y - 1;
      if (!mpz_divisible_p(shifted.get_mpz_t(), prime.get_mpz_t()))
        fail(Errc::kMalformedCiphertext, "CRT half: y - 1 is not divisible by the prime");
      return mod(BigInt(shifted / prime) * h, prime);
    }

    // r^N mod p^2 = (r^(q mod (p-1)) mod p)^p mod p^2, since x^p mod p^2
    // depends only on x mod p.
    static BigInt noise_half(const BigInt& r, const BigInt& prime, const BigInt& prime2, const BigInt& other) {
      BigInt e = other % (prime - 1), y, z;
      BigInt base = r % prime;
      mpz_powm(y.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), prime.get_mpz_t());
      mpz_powm(z.get_mpz_t(), y.get_mpz_t(), prime.get_mpz_t(), prime2.get_mpz_t());
      return z;
    }

    BigInt noise(const BigInt& r) const {
      BigInt a = noise_half(r, p, p2, q), b = noise_half(r, q, q2, p);
      return b + q2 * mod((a - b) * q2_inv_p2, p2);
    }

    BigInt decrypt(const BigInt& c) const {
      BigInt mp = half(c, p, p2, hp);
      BigInt mq = half(c, q, q2, hq);
      return mq + q * mod((mp - mq) * q_inv_p, p);
    }
  };

  void validate(const Ciphertext& c) const {
    pk_.check(c);
    if (c.value <= 0 || c.value >= pk_.n_squared()) fail(Errc::kMalformedCiphertext, "ciphertext outside (0, N^2)");
  }

  BigInt plain(const BigInt& c) const {
    BigInt y;
    mpz_powm(y.get_mpz_t(), c.get_mpz_t(), sk_.phi.get_mpz_t(), pk_.n_squared().get_mpz_t());
    return mod(gamma_dlog(y, pk_.n()) * sk_.phi_inv, pk_.n());
  }

  PublicKey pk_;
  SecretKey sk_;
  std::optional<CrtContext> crt_;
};

// Wire form: be64 fingerprint | big-integer encoding of the value.
inline Bytes serialize(const Ciphertext& c) {
  Bytes out;
  append_be64(out, c.modulus_id);
  append_bigint(out, c.value);
  return out;
}

inline Ciphertext deserialize(std::span<const std::uint8_t> in) {
  if (in.size() < 8) fail(Errc::kInvalidArgument, "truncated ciphertext");
  Ciphertext c;
  c.modulus_id = read_be(in.subspan(0, 8));
  c.value = decode_bigint(in.subspan(8));
  return c;
}

}  // namespace privagg::paillier
