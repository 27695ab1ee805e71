#include <gtest/gtest.h>

#include "interlock/error.hpp"
#include "interlock/mutate.hpp"
#include "support.hpp"

using namespace interlock;
using interlock::testing::data_path;
using interlock::testing::fixture;
using interlock::testing::slurp;

namespace {

ApplicationData sample(const std::string& name) {
  return parse_appdata(slurp(data_path("samples/" + name + ".ssi")));
}

}  // namespace

TEST(Mutate, FlipPointCommandOfRouteRequest) {
  const auto data = sample("route_request");
  const auto out = apply_mutation(data, {MutationType::b, {"R_CGC_011", 0}, std::nullopt});
  const auto& actions = out.route_requests.at("R_CGC_011").actions;
  const auto& before = data.route_requests.at("R_CGC_011").actions;
  ASSERT_EQ(actions.size(), before.size());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] == before[i]) continue;
    ++changed;
    EXPECT_EQ(actions[i].subject.name, "P_09C");
    EXPECT_EQ(actions[i].act, Act::command_normal);
  }
  EXPECT_EQ(changed, 1u);
}

TEST(Mutate, DropTrackConditionOfRelease) {
  const auto data = sample("subroute_release");
  const auto& conds = data.releases.at("U_CGC_20C").conditions;
  ASSERT_EQ(conds.size(), 3u);
  ASSERT_EQ(conds[2].subject.name, "T_10C");
  const auto out = apply_mutation(data, {MutationType::d, {"U_CGC_20C", 2}, std::nullopt});
  const auto& left = out.releases.at("U_CGC_20C").conditions;
  EXPECT_EQ(left.size(), 2u);
  for (const auto& c : left) EXPECT_NE(c.subject.name, "T_10C");
}

TEST(Mutate, AddConditionToRelease) {
  const auto& data = fixture().data;
  const auto out = apply_mutation(data, {MutationType::f, {"U_CGC_20C", 0}, std::nullopt});
  const auto& c = out.releases.at("U_CGC_20C").conditions;
  ASSERT_EQ(c.size(), data.releases.at("U_CGC_20C").conditions.size() + 1);
  EXPECT_EQ(c.back(), (Condition{component("U_CGC_20C"), interlock::Test::comp_free}));

  const auto custom = apply_mutation(
      data, {MutationType::f, {"U_CGC_20C", 0}, parse_condition("T_011 o")});
  EXPECT_EQ(custom.releases.at("U_CGC_20C").conditions.back(),
            (Condition{component("T_011"), interlock::Test::track_occupied}));
  EXPECT_THROW(apply_mutation(data, {MutationType::f, {"U_CGC_20C", 0},
                                     Condition{component("T_011"), interlock::Test::route_set}}),
               IncompatibleTarget);
}

TEST(Mutate, OnlyTheTargetChanges) {
  const auto& data = fixture().data;
  for (auto type : {MutationType::a, MutationType::b, MutationType::c, MutationType::d,
                    MutationType::e, MutationType::f}) {
    for (const auto& spec : enumerate_mutations(data, type)) {
      const auto copy = data;
      const auto out = apply_mutation(data, spec);
      EXPECT_EQ(data, copy);
      EXPECT_NE(out, data) << describe(spec, data);
      for (const auto& [name, rule] : data.route_requests) {
        if (name != spec.target.rule) {
          EXPECT_EQ(out.route_requests.at(name), rule);
        }
      }
      for (const auto& [name, rule] : data.releases) {
        if (name != spec.target.rule) {
          EXPECT_EQ(out.releases.at(name), rule);
        }
      }
      EXPECT_EQ(out.point_commands, data.point_commands);
    }
  }
}

TEST(Mutate, EnumerationCounts) {
  const auto& data = fixture().data;
  EXPECT_EQ(enumerate_mutations(data, MutationType::a).size(), 16u);
  EXPECT_EQ(enumerate_mutations(data, MutationType::b).size(), 8u);
  EXPECT_EQ(enumerate_mutations(data, MutationType::c).size(), 8u);
  EXPECT_EQ(enumerate_mutations(data, MutationType::d).size(), 24u);
  EXPECT_EQ(enumerate_mutations(data, MutationType::e).size(), 8u);
  EXPECT_EQ(enumerate_mutations(data, MutationType::f).size(), 11u);
}

TEST(Mutate, Errors) {
  const auto& data = fixture().data;
  EXPECT_THROW(apply_mutation(data, {MutationType::a, {"U_CGC_20C", 0}, std::nullopt}),
               IncompatibleTarget);
  EXPECT_THROW(apply_mutation(data, {MutationType::d, {"U_IR(09C)", 0}, std::nullopt}),
               IncompatibleTarget);
  EXPECT_THROW(apply_mutation(data, {MutationType::e, {"U_CGC_20C", 0}, std::nullopt}),
               IncompatibleTarget);
  EXPECT_THROW(apply_mutation(data, {MutationType::a, {"R_CGC_011", 99}, std::nullopt}),
               IncompatibleTarget);
  EXPECT_THROW(apply_mutation(data, {MutationType::b, {"R_NONE", 0}, std::nullopt}),
               IncompatibleTarget);

  const auto single = parse_appdata("U_A f if T_1 c\n");
  EXPECT_THROW(apply_mutation(single, {MutationType::d, {"U_A", 0}, std::nullopt}),
               NothingToRemove);
  const auto bare = parse_appdata("*Q_R(A_1)\n if R_A_1 xs\n then R_A_1 s\n");
  EXPECT_THROW(apply_mutation(bare, {MutationType::b, {"R_A_1", 0}, std::nullopt}),
               NothingToRemove);
  EXPECT_THROW(apply_mutation(bare, {MutationType::c, {"R_A_1", 0}, std::nullopt}),
               NothingToRemove);
}

TEST(Mutate, TextForms) {
  EXPECT_EQ(parse_mutation_type("d"), MutationType::d);
  EXPECT_THROW(parse_mutation_type("g"), ConfigError);
  EXPECT_THROW(parse_mutation_type("ab"), ConfigError);
  EXPECT_EQ(parse_mutation_types("a,c,f").size(), 3u);
  EXPECT_EQ(parse_locator("U_IR(09C):2"), (RuleLocator{"U_IR(09C)", 2}));
  EXPECT_EQ(to_string(RuleLocator{"R_CGC_011", 3}), "R_CGC_011:3");
  EXPECT_THROW(parse_locator("R_CGC_011"), ConfigError);
  EXPECT_THROW(parse_locator("R_CGC_011:x"), ConfigError);
  EXPECT_EQ(parse_condition("U_CGC_20C f"), (Condition{component("U_CGC_20C"), interlock::Test::comp_free}));
  EXPECT_THROW(parse_condition("U_CGC_20C zz"), ConfigError);
  EXPECT_THROW(parse_condition("T_1 s"), ConfigError);
  EXPECT_EQ(describe({MutationType::a, {"R_CGC_011", 3}, std::nullopt}, fixture().data),
            "a R_CGC_011:3 drops \"U_KXC_20C f\"");
}
