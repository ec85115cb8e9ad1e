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

// Thin wrappers over OpenSSL: SHA-256, a SHA-256 counter-mode expander and
// AES-128-GCM.

#pragma once

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "privagg/error.hpp"

namespace privagg {

using Bytes = std::vector<std::uint8_t>;
using Sha256Digest = std::array<std::uint8_t, SHA256_DIGEST_LENGTH>;

inline Sha256Digest sha256(std::span<const std::uint8_t> data) {
  Sha256Digest out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

inline void append_be64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline void append_be32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline std::uint64_t read_be(std::span<const std::uint8_t> in) {
  std::uint64_t v = 0;
  for (auto b : in) v = (v << 8) | b;
  return v;
}

/// Expands `prefix` into `length` bytes as SHA-256(prefix || be64(block)) for
/// block = 0, 1, ...
inline Bytes sha256_expand(std::span<const std::uint8_t> prefix, std::size_t length) {
  Bytes out;
  out.reserve(length + SHA256_DIGEST_LENGTH);
  Bytes block(prefix.begin(), prefix.end());
  const std::size_t counter_at = block.size();
  block.resize(counter_at + 8);
  for (std::uint64_t counter = 0; out.size() < length; ++counter) {
    for (int i = 0; i < 8; ++i) block[counter_at + i] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));
    auto digest = sha256(block);
    out.insert(out.end(), digest.begin(), digest.end());
  }
  out.resize(length);
  return out;
}

constexpr std::size_t kAesKeyBytes = 16;
constexpr std::size_t kGcmNonceBytes = 12;
constexpr std::size_t kGcmTagBytes = 16;

using AesKey = std::array<std::uint8_t, kAesKeyBytes>;
using GcmNonce = std::array<std::uint8_t, kGcmNonceBytes>;

namespace detail {
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

inline CipherCtx new_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) fail(Errc::kInvalidArgument, "EVP_CIPHER_CTX_new failed");
  return ctx;
}
}  // namespace detail

/// AES-128-GCM encryption; returns ciphertext || 16-byte tag.
inline Bytes aes_gcm_seal(const AesKey& key, const GcmNonce& nonce, std::span<const std::uint8_t> aad,
                          std::span<const std::uint8_t> plaintext) {
  auto ctx = detail::new_ctx();
  int len = 0;
  Bytes out(plaintext.size() + kGcmTagBytes);
  bool ok = EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(), nonce.data()) == 1;
  if (ok && !aad.empty()) ok = EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1;
  if (ok && !plaintext.empty())
    ok = EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(), static_cast<int>(plaintext.size())) == 1;
  if (ok) ok = EVP_EncryptFinal_ex(ctx.get(), out.data() + plaintext.size(), &len) == 1;
  if (ok)
    ok = EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(kGcmTagBytes),
                             out.data() + plaintext.size()) == 1;
  if (!ok) fail(Errc::kInvalidArgument, "AES-GCM encryption failed");
  return out;
}

/// Inverse of aes_gcm_seal. Throws kAuthenticationFailure on a bad tag.
inline Bytes aes_gcm_open(const AesKey& key, const GcmNonce& nonce, std::span<const std::uint8_t> aad,
                          std::span<const std::uint8_t> sealed) {
  if (sealed.size() < kGcmTagBytes) fail(Errc::kAuthenticationFailure, "sealed body shorter than tag");
  const std::size_t body = sealed.size() - kGcmTagBytes;
  auto ctx = detail::new_ctx();
  int len = 0;
  Bytes out(body);
  Bytes tag(sealed.begin() + static_cast<std::ptrdiff_t>(body), sealed.end());
  bool ok = EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(), nonce.data()) == 1;
  if (ok && !aad.empty()) ok = EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1;
  if (ok && body > 0) ok = EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), static_cast<int>(body)) == 1;
  if (ok) ok = EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(kGcmTagBytes), tag.data()) == 1;
  if (!ok || EVP_DecryptFinal_ex(ctx.get(), out.data() + body, &len) != 1)
    fail(Errc::kAuthenticationFailure, "AES-GCM tag mismatch");
  return out;
}

}  // namespace privagg
