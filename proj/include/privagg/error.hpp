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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace privagg {

enum class Errc {
  kInvalidArgument,
  kOutOfRange,
  kNotInvertible,
  kPrimeSearchExhausted,
  kMalformedCiphertext,
  kModulusMismatch,
  kSlotOverflow,
  kWrapDetected,
  kMissingContribution,
  kProtocolAbort,
  kAuthenticationFailure,
  kDisconnectedGraph,
  kUnknownParticipant,
  kOverflowGuard,
  kChallengeRejected,
  kConfig,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kOutOfRange: return "out-of-range";
    case Errc::kNotInvertible: return "not-invertible";
    case Errc::kPrimeSearchExhausted: return "prime-search-exhausted";
    case Errc::kMalformedCiphertext: return "malformed-ciphertext";
    case Errc::kModulusMismatch: return "modulus-mismatch";
    case Errc::kSlotOverflow: return "slot-overflow";
    case Errc::kWrapDetected: return "wrap-detected";
    case Errc::kMissingContribution: return "missing-contribution";
    case Errc::kProtocolAbort: return "protocol-abort";
    case Errc::kAuthenticationFailure: return "authentication-failure";
    case Errc::kDisconnectedGraph: return "disconnected-graph";
    case Errc::kUnknownParticipant: return "unknown-participant";
    case Errc::kOverflowGuard: return "overflow-guard";
    case Errc::kChallengeRejected: return "challenge-rejected";
    case Errc::kConfig: return "config";
  }
  return "unknown";
}

/// Single exception type for the library; `code()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, Errc code, const char* what) {
  if (!condition) fail(code, what);
}

}  // namespace privagg
