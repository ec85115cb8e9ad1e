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

// Line-oriented `key = value` files. '#' starts a comment; blank lines are
// skipped. Every failure is Errc::kConfig with the line number.

#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "privagg/error.hpp"
#include "privagg/numeric.hpp"

namespace privagg::config {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class KeyValues {
 public:
  static KeyValues parse(std::istream& in) {
    KeyValues kv;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string body = trim(line);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) fail(Errc::kConfig, "line " + std::to_string(no) + ": expected key = value");
      std::string key = trim(std::string_view(body).substr(0, eq));
      std::string value = trim(std::string_view(body).substr(eq + 1));
      if (key.empty()) fail(Errc::kConfig, "line " + std::to_string(no) + ": empty key");
      if (kv.values_.count(key)) fail(Errc::kConfig, "line " + std::to_string(no) + ": duplicate key '" + key + "'");
      kv.values_.emplace(std::move(key), std::move(value));
    }
    return kv;
  }

  static KeyValues parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static KeyValues load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::kConfig, "cannot open config file '" + path + "'");
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const std::string& text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail(Errc::kConfig, "missing key '" + key + "'");
    return it->second;
  }

  template <typename T>
  T number(const std::string& key) const {
    const std::string& v = text(key);
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail(Errc::kConfig, "key '" + key + "': bad number '" + v + "'");
    return out;
  }

  template <typename T>
  T number_or(const std::string& key, T fallback) const {
    return has(key) ? number<T>(key) : fallback;
  }

  BigInt big(const std::string& key) const {
    BigInt out;
    if (out.set_str(text(key), 10) != 0) fail(Errc::kConfig, "key '" + key + "': bad integer");
    return out;
  }

  /// Comma or whitespace separated integers.
  std::vector<BigInt> big_list(const std::string& key) const {
    std::string v = text(key);
    for (char& c : v)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream in(v);
    std::vector<BigInt> out;
    for (std::string tok; in >> tok;) {
      BigInt x;
      if (x.set_str(tok, 10) != 0) fail(Errc::kConfig, "key '" + key + "': bad integer '" + tok + "'");
      out.push_back(x);
    }
    return out;
  }

  /// Fails on keys outside `allowed`, so typos do not pass silently.
  void restrict_to(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
      if (!allowed.count(k)) fail(Errc::kConfig, "unknown key '" + k + "'");
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace privagg::config
