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

#include "privagg/simnet.hpp"

#include <sstream>

#include "gtest/gtest.h"

namespace privagg::sim {
namespace {

TEST(TopologyTest, CompleteGraphDegrees) {
  auto rng = RandomSource::deterministic(1);
  Topology t = gen_topology(7, 1.0, rng);
  for (auto d : t.degrees()) EXPECT_EQ(d, 6u);
  EXPECT_TRUE(t.connected());
}

TEST(TopologyTest, EmptyGraphRejectedWhenConnectivityRequired) {
  auto rng = RandomSource::deterministic(1);
  try {
    gen_topology(3, 0.0, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDisconnectedGraph);
  }
  EXPECT_NO_THROW(gen_topology(3, 0.0, rng, false));
}

TEST(TopologyTest, SeededSamplesReproduce) {
  auto a = RandomSource::deterministic(2024);
  auto b = RandomSource::deterministic(2024);
  Topology ta = gen_topology(50, 0.2, a);
  Topology tb = gen_topology(50, 0.2, b);
  EXPECT_EQ(ta.degrees(), tb.degrees());
  EXPECT_EQ(ta.edges(), tb.edges());
  DegreeStats s = ta.degree_stats();
  EXPECT_LE(s.min, s.avg);
  EXPECT_LE(s.avg, static_cast<double>(s.max));
}

TEST(TopologyTest, AggregatorLinksEveryone) {
  Topology t = Topology::path(4);
  EXPECT_TRUE(t.linked(0, 3));
  EXPECT_TRUE(t.linked(2, 3));
  EXPECT_FALSE(t.linked(1, 3));
  EXPECT_FALSE(t.linked(2, 2));
}

TEST(NetworkTest, EmptyRoundIsEmpty) {
  Network net(Topology::complete(2));
  for (ParticipantId id = 0; id < 3; ++id) net.set_handler(id, [](Outbox&, const std::vector<Message>&) {});
  net.run_round();
  EXPECT_TRUE(net.trace().messages.empty());
  EXPECT_EQ(net.trace().total_bytes(), 0u);
  for (const auto& h : net.trace().handlers) EXPECT_EQ(h.ops, OpCounters{});
}

TEST(NetworkTest, TwoEnvelopesCountThirtyTwoBytes) {
  Network net(Topology::complete(2));
  std::vector<std::size_t> received(3, 0);
  for (ParticipantId id = 1; id <= 2; ++id)
    net.set_handler(id, [&, id](Outbox& out, const std::vector<Message>& inbox) {
      received[id] += inbox.size();
      if (net.round() == 1) out.send(id == 1 ? 2 : 1, "envelope", Bytes(16, 0xab));
    });
  net.set_handler(0, [](Outbox&, const std::vector<Message>&) {});
  net.run_round();
  net.run_round();
  EXPECT_EQ(net.trace().total_bytes(), 32u);
  EXPECT_EQ(received[1], 1u);
  EXPECT_EQ(received[2], 1u);
  EXPECT_EQ(net.sent(), net.delivered());
}

TEST(NetworkTest, DeliveryIsSortedByRecipientThenSender) {
  Network net(Topology::complete(3));
  std::vector<ParticipantId> order;
  for (ParticipantId id = 0; id <= 3; ++id)
    net.set_handler(id, [&, id](Outbox& out, const std::vector<Message>& inbox) {
      for (const auto& m : inbox) order.push_back(m.sender);
      if (net.round() == 1 && id != 1) out.send(1, "x", {});
    });
  net.run_round();
  net.run_round();
  EXPECT_EQ(order, (std::vector<ParticipantId>{0, 2, 3}));
}

TEST(NetworkTest, NonEdgeRejected) {
  Network net(Topology::path(3));
  net.set_handler(1, [](Outbox& out, const std::vector<Message>&) { out.send(3, "x", {}); });
  EXPECT_THROW(net.run_round(), Error);
}

TEST(NetworkTest, UnregisteredRecipientRejected) {
  Network net(Topology::complete(2));
  net.set_handler(1, [&](Outbox& out, const std::vector<Message>&) {
    if (net.round() == 1) out.send(2, "x", {});
  });
  net.run_round();
  try {
    net.run_round();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnknownParticipant);
  }
}

TEST(NetworkTest, CountersAreBookedPerHandler) {
  Network net(Topology::complete(2));
  net.set_handler(1, [](Outbox&, const std::vector<Message>&) { count_exp(); });
  net.set_handler(2, [](Outbox&, const std::vector<Message>&) { count_mult(); });
  net.run_round();
  net.run_round();
  EXPECT_EQ(net.trace().ops_of(1), (OpCounters{2, 0, 0, 0}));
  EXPECT_EQ(net.trace().ops_of(2), (OpCounters{0, 2, 0, 0}));
}

TEST(NetworkTest, TracesAreDeterministicWithoutWallTime) {
  auto run = [] {
    Network net(Topology::complete(3));
    for (ParticipantId id = 0; id <= 3; ++id)
      net.set_handler(id, [&net, id](Outbox& out, const std::vector<Message>& inbox) {
        count_exp();
        if (net.round() < 3) out.send((id + 1) % 4, "m", Bytes(id + inbox.size(), 1));
      });
    for (int r = 0; r < 4; ++r) net.run_round();
    std::ostringstream os;
    net.trace().write_csv(os, false);
    return os.str();
  };
  std::string a = run();
  EXPECT_EQ(a, run());
  EXPECT_EQ(a.substr(0, a.find('\n')), "round,sender,recipient,bytes,exps,mults,encs,decs,wall_ns");
}

}  // namespace
}  // namespace privagg::sim
