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

// Round-based message passing between participant 0 (aggregator or system
// operator) and agents 1..M. Messages sent in round r are delivered in round
// r + 1, sorted by (recipient, sender, send order). Every registered handler
// runs once per round, in id order, under its own operation counter.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "privagg/numeric.hpp"

namespace privagg::sim {

using ParticipantId = std::uint32_t;
constexpr ParticipantId kAggregator = 0;

struct DegreeStats {
  std::size_t min = 0;
  double avg = 0;
  std::size_t max = 0;
};

/// Undirected agent graph plus the implicit star from participant 0.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::size_t agents) : agents_(agents), adj_(agents + 1) {}

  static Topology complete(std::size_t agents) {
    Topology t(agents);
    for (ParticipantId i = 1; i <= agents; ++i)
      for (ParticipantId j = i + 1; j <= agents; ++j) t.add_edge(i, j);
    t.edge_probability_ = 1.0;
    return t;
  }

  static Topology path(std::size_t agents) {
    Topology t(agents);
    for (ParticipantId i = 1; i < agents; ++i) t.add_edge(i, i + 1);
    return t;
  }

  /// No agent-agent edges: only the star through participant 0.
  static Topology star(std::size_t agents) { return Topology(agents); }

  void add_edge(ParticipantId a, ParticipantId b) {
    require(a != b && a >= 1 && b >= 1 && a <= agents_ && b <= agents_, Errc::kInvalidArgument,
            "edge endpoints must be distinct agents");
    adj_[a].insert(b);
    adj_[b].insert(a);
  }

  std::size_t agents() const { return agents_; }
  std::size_t participants() const { return agents_ + 1; }
  double edge_probability() const { return edge_probability_; }
  void set_edge_probability(double p) { edge_probability_ = p; }

  bool has_edge(ParticipantId a, ParticipantId b) const { return a <= agents_ && adj_[a].count(b) > 0; }

  /// Direct channel: participant 0 reaches everyone, agents reach their
  /// graph neighbours.
  bool linked(ParticipantId a, ParticipantId b) const {
    if (a == b) return false;
    if (a == kAggregator || b == kAggregator) return a <= agents_ && b <= agents_;
    return has_edge(a, b);
  }

  /// Agent neighbours of an agent, ascending.
  std::vector<ParticipantId> neighbors(ParticipantId a) const { return {adj_[a].begin(), adj_[a].end()}; }

  std::vector<std::pair<ParticipantId, ParticipantId>> edges() const {
    std::vector<std::pair<ParticipantId, ParticipantId>> out;
    for (ParticipantId a = 1; a <= agents_; ++a)
      for (ParticipantId b : adj_[a])
        if (a < b) out.emplace_back(a, b);
    return out;
  }

  /// Degree of each agent in the agent graph.
  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> d;
    for (ParticipantId a = 1; a <= agents_; ++a) d.push_back(adj_[a].size());
    return d;
  }

  DegreeStats degree_stats() const {
    auto d = degrees();
    if (d.empty()) return {};
    DegreeStats s{*std::min_element(d.begin(), d.end()), 0, *std::max_element(d.begin(), d.end())};
    for (auto v : d) s.avg += static_cast<double>(v);
    s.avg /= static_cast<double>(d.size());
    return s;
  }

  /// Connectivity of the agent graph alone (the star is not counted).
  bool connected() const {
    if (agents_ <= 1) return true;
    std::vector<bool> seen(agents_ + 1, false);
    std::vector<ParticipantId> stack{1};
    seen[1] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      ParticipantId a = stack.back();
      stack.pop_back();
      for (ParticipantId b : adj_[a])
        if (!seen[b]) {
          seen[b] = true;
          ++count;
          stack.push_back(b);
        }
    }
    return count == agents_;
  }

 private:
  std::size_t agents_ = 0;
  double edge_probability_ = 0;
  std::vector<std::set<ParticipantId>> adj_;
};

constexpr unsigned kTopologyRetries = 1000;

/// Erdos-Renyi sample. With `require_connected`, disconnected samples are
/// redrawn up to kTopologyRetries times.
inline Topology gen_topology(std::size_t agents, double p, RandomSource& rng, bool require_connected = true) {
  require(p >= 0 && p <= 1, Errc::kInvalidArgument, "edge probability outside [0, 1]");
  for (unsigned attempt = 0; attempt < kTopologyRetries; ++attempt) {
    Topology t(agents);
    t.set_edge_probability(p);
    for (ParticipantId i = 1; i <= agents; ++i)
      for (ParticipantId j = i + 1; j <= agents; ++j)
        if (rng.unit_double() < p) t.add_edge(i, j);
    if (!require_connected || t.connected()) return t;
  }
  fail(Errc::kDisconnectedGraph, "no connected sample within the retry budget");
}

// ---------------------------------------------------------------------------

struct Message {
  ParticipantId sender = 0;
  ParticipantId recipient = 0;
  std::string kind;
  Bytes payload;
};

struct MessageRecord {
  std::size_t round = 0;
  ParticipantId sender = 0;
  ParticipantId recipient = 0;
  std::string kind;
  std::size_t bytes = 0;
};

struct HandlerRecord {
  std::size_t round = 0;
  ParticipantId participant = 0;
  std::string phase;
  OpCounters ops;
  std::int64_t wall_ns = 0;
};

class SimTrace {
 public:
  std::vector<MessageRecord> messages;
  std::vector<HandlerRecord> handlers;

  std::size_t total_bytes() const {
    std::size_t sum = 0;
    for (const auto& m : messages) sum += m.bytes;
    return sum;
  }

  std::size_t bytes_of_kind(const std::string& kind) const {
    std::size_t sum = 0;
    for (const auto& m : messages)
      if (m.kind == kind) sum += m.bytes;
    return sum;
  }

  std::size_t count_of_kind(const std::string& kind) const {
    return static_cast<std::size_t>(
        std::count_if(messages.begin(), messages.end(), [&](const MessageRecord& m) { return m.kind == kind; }));
  }

  OpCounters ops_of(ParticipantId id, const std::string& phase = {}) const {
    OpCounters sum;
    for (const auto& h : handlers)
      if (h.participant == id && (phase.empty() || h.phase == phase)) sum += h.ops;
    return sum;
  }

  std::int64_t wall_ns_of(ParticipantId id, const std::string& phase = {}) const {
    std::int64_t sum = 0;
    for (const auto& h : handlers)
      if (h.participant == id && (phase.empty() || h.phase == phase)) sum += h.wall_ns;
    return sum;
  }

  /// Columns: round, sender, recipient, bytes, exps, mults, encs, decs,
  /// wall_ns. Handler rows carry recipient -1; message rows carry zero
  /// counters. Without `with_wall` the wall column is written as 0.
  void write_csv(std::ostream& os, bool with_wall = true) const {
    os << "round,sender,recipient,bytes,exps,mults,encs,decs,wall_ns\n";
    std::size_t mi = 0, hi = 0;
    // Interleave by round: handler rows first, then the messages they sent.
    while (mi < messages.size() || hi < handlers.size()) {
      bool take_handler = hi < handlers.size() && (mi == messages.size() || handlers[hi].round <= messages[mi].round);
      if (take_handler) {
        const auto& h = handlers[hi++];
        os << h.round << ',' << h.participant << ",-1,0," << h.ops.exps << ',' << h.ops.mults << ',' << h.ops.encs
           << ',' << h.ops.decs << ',' << (with_wall ? h.wall_ns : 0) << '\n';
      } else {
        const auto& m = messages[mi++];
        os << m.round << ',' << m.sender << ',' << m.recipient << ',' << m.bytes << ",0,0,0,0,0\n";
      }
    }
  }
};

class Outbox {
 public:
  Outbox(ParticipantId self, std::vector<Message>& sink) : self_(self), sink_(sink) {}
  ParticipantId self() const { return self_; }
  void send(ParticipantId to, std::string kind, Bytes payload) {
    sink_.push_back(Message{self_, to, std::move(kind), std::move(payload)});
  }

 private:
  ParticipantId self_;
  std::vector<Message>& sink_;
};

using Handler = std::function<void(Outbox&, const std::vector<Message>& inbox)>;

class Network {
 public:
  explicit Network(Topology topology) : topology_(std::move(topology)) {}

  const Topology& topology() const { return topology_; }
  SimTrace& trace() { return trace_; }
  const SimTrace& trace() const { return trace_; }
  std::size_t round() const { return round_; }
  std::size_t pending() const { return pending_.size(); }

  /// Label recorded on subsequent handler rows ("offline", "online", ...).
  void set_phase(std::string phase) { phase_ = std::move(phase); }

  void set_handler(ParticipantId id, Handler h) {
    require(id < topology_.participants(), Errc::kUnknownParticipant, "handler for an unknown participant");
    handlers_[id] = std::move(h);
  }
  void clear_handlers() { handlers_.clear(); }

  /// Runs work outside the message flow (setup, local computation) and books
  /// its counters to `id` in the current round.
  template <typename Fn>
  void run_local(ParticipantId id, Fn&& fn) {
    OpCounters ops;
    auto start = std::chrono::steady_clock::now();
    {
      CountingScope scope(ops);
      fn();
    }
    auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
    trace_.handlers.push_back({round_, id, phase_, ops, ns});
  }

  /// Delivers pending messages, invokes every handler once and queues what
  /// they send for the next round.
  void run_round() {
    ++round_;
    std::vector<Message> inbound = std::move(pending_);
    pending_.clear();
    std::stable_sort(inbound.begin(), inbound.end(), [](const Message& a, const Message& b) {
      return std::tie(a.recipient, a.sender) < std::tie(b.recipient, b.sender);
    });
    std::map<ParticipantId, std::vector<Message>> inboxes;
    for (auto& m : inbound) {
      if (!handlers_.count(m.recipient)) fail(Errc::kUnknownParticipant, "message to an unregistered participant");
      ++delivered_;
      inboxes[m.recipient].push_back(std::move(m));
    }
    static const std::vector<Message> kEmpty;
    for (auto& [id, handler] : handlers_) {
      std::vector<Message> out;
      Outbox outbox(id, out);
      auto it = inboxes.find(id);
      run_local(id, [&] { handler(outbox, it == inboxes.end() ? kEmpty : it->second); });
      for (auto& m : out) post(std::move(m));
    }
  }

  /// Queues a message for the next round, enforcing channels.
  void post(Message m) {
    if (m.recipient >= topology_.participants()) fail(Errc::kUnknownParticipant, "recipient id out of range");
    if (!topology_.linked(m.sender, m.recipient))
      fail(Errc::kInvalidArgument, "no channel between " + std::to_string(m.sender) + " and " +
                                       std::to_string(m.recipient));
    trace_.messages.push_back({round_, m.sender, m.recipient, m.kind, m.payload.size()});
    ++sent_;
    pending_.push_back(std::move(m));
  }

  std::size_t sent() const { return sent_; }
  std::size_t delivered() const { return delivered_; }

 private:
  Topology topology_;
  std::map<ParticipantId, Handler> handlers_;
  std::vector<Message> pending_;
  SimTrace trace_;
  std::string phase_ = "online";
  std::size_t round_ = 0;
  std::size_t sent_ = 0;
  std::size_t delivered_ = 0;
};

}  // namespace privagg::sim
