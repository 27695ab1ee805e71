#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "interlock/propgen.hpp"
#include "support.hpp"

using namespace interlock;
using interlock::testing::fixture;

namespace {

std::size_t of_class(const std::vector<Property>& ps, int cls) {
  return static_cast<std::size_t>(
      std::count_if(ps.begin(), ps.end(), [&](const Property& p) { return p.cls == cls; }));
}

}  // namespace

TEST(Propgen, SuiteSizeIsExact) {
  const auto& m = fixture().model;
  const auto& g = m.graph;
  const auto ps = gen_properties(m, 1440, 240);

  std::size_t adjacent = 0;
  std::size_t crossings = 0;
  for (const auto& p : g.point_ids()) {
    const auto& n = g.nodes.at(p);
    std::set<std::string> tracks;
    for (const auto& e : n.edges) tracks.insert(g.edges.at(e).track);
    adjacent += tracks.size();
    const auto& toe = g.edges.at(n.toe_edge).track;
    for (const auto* leg : {&n.normal_edge, &n.reverse_edge}) {
      if (g.edges.at(*leg).track != toe) crossings += 2;
    }
  }
  EXPECT_EQ(of_class(ps, 1), g.tracks.size());
  EXPECT_EQ(of_class(ps, 2), adjacent);
  EXPECT_EQ(of_class(ps, 3), crossings);
  EXPECT_EQ(of_class(ps, 4), 4u);
  EXPECT_EQ(of_class(ps, 5), 8u + 3u);
  EXPECT_EQ(ps.size(), g.tracks.size() + adjacent + crossings + m.routes.size() +
                           m.subroutes.size() + m.uirs.size());
  EXPECT_EQ(ps.size(), 35u);
  EXPECT_EQ(gen_availability(m, 1440, 240).size(), 15u);
}

TEST(Propgen, GeneratedTextMatchesRequirements) {
  const auto ps = gen_properties(fixture().model, 1440, 240);
  auto has = [&](const std::string& text) {
    return std::any_of(ps.begin(), ps.end(), [&](const Property& p) { return p.text == text; });
  };
  EXPECT_TRUE(has("G[1440] trains(T_10C) <= 1"));
  EXPECT_TRUE(has("GF[1440,240] sub(U_CGC_20C) == free"));
  EXPECT_TRUE(has("GF[1440,240] route(R_CGC_011) == set"));
  EXPECT_TRUE(has("GF[1440,240] uir(U_IR(09C)) == free"));
  EXPECT_TRUE(has("G[1440] (trains(T_101) == 1) => (point(P_09C) == next(point(P_09C)))"));
  // The normal leg of P_09C joins T_101 to T_09C.
  EXPECT_TRUE(std::any_of(ps.begin(), ps.end(), [](const Property& p) {
    return p.cls == 3 && p.text.find("trains(T_101) == 1 & trains(T_09C) == 0") != std::string::npos &&
           p.text.find("point(P_09C) == left") != std::string::npos;
  }));
}

TEST(Propgen, EveryFormulaReparses) {
  for (const auto& p : gen_properties(fixture().model, 1440, 240)) {
    EXPECT_EQ(parse_formula(p.text), p.formula) << p.text;
    EXPECT_EQ(parse_formula(print_formula(p.formula)), p.formula) << p.text;
    EXPECT_TRUE(is_safety(p.cls) != is_availability(p.cls));
  }
}

TEST(Propgen, NoRoutesNoRouteFormulas) {
  auto m = fixture().model;
  m.data.route_requests.clear();
  const auto ps = gen_availability(m, 1440, 240);
  EXPECT_EQ(of_class(ps, 4), 0u);
}
