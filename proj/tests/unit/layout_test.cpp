#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "interlock/error.hpp"
#include "interlock/layout.hpp"
#include "support.hpp"

using namespace interlock;
using interlock::testing::data_path;
using interlock::testing::slurp;

namespace {

const char* kSingleTrack = R"(<station name="tiny">
  <track id="T_1"/>
  <edge id="e1" from="A" to="B" track="T_1"/>
</station>)";

}  // namespace

TEST(Layout, FixtureCounts) {
  const auto g = parse_layout(slurp(data_path("fixture/station.xml")));
  EXPECT_EQ(g.name, "fixture");
  EXPECT_EQ(g.nodes.size(), 12u);
  EXPECT_EQ(g.edges.size(), 11u);
  EXPECT_EQ(g.tracks.size(), 6u);
  EXPECT_EQ(g.point_ids(), (std::vector<std::string>{"P_09C", "P_10C"}));
  EXPECT_EQ(g.entry_signals.size(), 4u);
  EXPECT_EQ(g.nodes.at("X_101").kind, NodeKind::boundary);
  EXPECT_EQ(g.nodes.at("J_1").kind, NodeKind::joint);
  EXPECT_EQ(g.nodes.at("CGC").kind, NodeKind::signal);
  EXPECT_EQ(g.nodes.at("CGC").direction, Direction::up);
  EXPECT_EQ(g.nodes.at("P_09C").normal_edge, "e02");
}

TEST(Layout, SingleTrackStation) {
  const auto g = parse_layout(kSingleTrack);
  EXPECT_EQ(g.nodes.size(), 2u);
  EXPECT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(edges_of_track(g, "T_1"), std::vector<std::string>{"e1"});
}

TEST(Layout, EdgesOfTrack) {
  const auto g = parse_layout(slurp(data_path("fixture/station.xml")));
  EXPECT_EQ(edges_of_track(g, "T_10C"), (std::vector<std::string>{"e06", "e07"}));
  EXPECT_THROW(edges_of_track(g, "T_missing"), UnknownTrack);
}

TEST(Layout, NodeDegreeInvariants) {
  const auto g = parse_layout(slurp(data_path("fixture/station.xml")));
  for (const auto& [id, n] : g.nodes) {
    switch (n.kind) {
      case NodeKind::point: {
        EXPECT_EQ(n.edges.size(), 3u) << id;
        std::set<std::string> roles{n.toe_edge, n.normal_edge, n.reverse_edge};
        EXPECT_EQ(roles.size(), 3u) << id;
        break;
      }
      case NodeKind::boundary: EXPECT_EQ(n.edges.size(), 1u) << id; break;
      default: EXPECT_LE(n.edges.size(), 2u) << id;
    }
  }
  for (const auto& [id, e] : g.edges) {
    EXPECT_NE(e.from, e.to);
    EXPECT_TRUE(g.nodes.count(e.from) && g.nodes.count(e.to)) << id;
  }
}

// The two legs of a point lead to disjoint parts of the graph once the point
// itself is removed.
TEST(Layout, PointLegsDiverge) {
  const auto g = parse_layout(slurp(data_path("fixture/station.xml")));
  for (const auto& p : g.point_ids()) {
    const auto& node = g.nodes.at(p);
    auto reach = [&](const std::string& edge) {
      std::set<std::string> seen{p};
      std::vector<std::string> todo{g.edges.at(edge).other(p)};
      std::set<std::string> edges{edge};
      while (!todo.empty()) {
        auto n = todo.back();
        todo.pop_back();
        if (!seen.insert(n).second) continue;
        for (const auto& e : g.nodes.at(n).edges) {
          edges.insert(e);
          todo.push_back(g.edges.at(e).other(n));
        }
      }
      return edges;
    };
    const auto normal = reach(node.normal_edge);
    EXPECT_FALSE(normal.count(node.reverse_edge)) << p;
  }
}

TEST(Layout, ElementOrderDoesNotMatter) {
  const auto text = slurp(data_path("fixture/station.xml"));
  const auto g = parse_layout(text);
  // Shuffle the element lines between the root tags.
  std::istringstream in(text);
  std::vector<std::string> lines;
  std::string head, line;
  std::vector<std::string> body;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line.find("<station") != std::string::npos) {
      inside = true;
      head += line + "\n";
      continue;
    }
    if (line.find("</station>") != std::string::npos) inside = false;
    if (inside && line.find("<") != std::string::npos) {
      body.push_back(line);
    } else if (!inside && body.empty()) {
      head += line + "\n";
    }
  }
  std::mt19937_64 rng(3);
  for (int round = 0; round < 5; ++round) {
    std::shuffle(body.begin(), body.end(), rng);
    std::string shuffled = head;
    for (const auto& l : body) shuffled += l + "\n";
    shuffled += "</station>\n";
    EXPECT_EQ(parse_layout(shuffled), g);
  }
}

TEST(Layout, Errors) {
  EXPECT_THROW(parse_layout("<station name='x'><track id='T_1'>"), XmlError);
  EXPECT_THROW(parse_layout("<station name='x'><track/></station>"), SchemaError);
  EXPECT_THROW(parse_layout(R"(<station name="x">
    <track id="T_1"/>
    <edge id="e1" from="A" to="P" track="T_1"/>
    <edge id="e2" from="P" to="B" track="T_1"/>
    <point id="P" toe="e1" normal="e2" reverse="e9"/>
  </station>)"),
               TopologyError);
  // A point with only two edges.
  EXPECT_THROW(parse_layout(R"(<station name="x">
    <track id="T_1"/>
    <edge id="e1" from="A" to="P" track="T_1"/>
    <edge id="e2" from="P" to="B" track="T_1"/>
    <point id="P" toe="e1" normal="e2" reverse="e2"/>
  </station>)"),
               TopologyError);
}

TEST(Layout, UnknownElementsStrictOrLenient) {
  const std::string text = R"(<station name="tiny">
  <track id="T_1"/>
  <speedProfile id="s1"/>
  <edge id="e1" from="A" to="B" track="T_1"/>
</station>)";
  EXPECT_THROW(parse_layout(text), SchemaError);
  const auto lenient = parse_layout_ex(text, {true});
  EXPECT_EQ(lenient.graph.edges.size(), 1u);
  EXPECT_EQ(lenient.warnings.size(), 1u);
}
