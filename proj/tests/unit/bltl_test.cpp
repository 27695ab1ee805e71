#include <gtest/gtest.h>

#include <random>

#include "interlock/bltl.hpp"
#include "interlock/error.hpp"
#include "support.hpp"

using namespace interlock;
using interlock::testing::tiny_schema;

namespace {

// Records over the tiny schema with one value changed per call.
struct TraceBuilder {
  RecordSchema schema = tiny_schema();
  StateRecord cur;
  std::vector<StateRecord> trace;

  TraceBuilder() {
    cur.points.assign(2, 0);
    cur.routes.assign(2, 0);
    cur.subroutes.assign(2, 0);
    cur.uirs.assign(1, 0);
    cur.tracks.assign(2, 0);
  }
  TraceBuilder& push(std::uint64_t nb) {
    cur.nb = nb;
    trace.push_back(cur);
    return *this;
  }
};

Formula bound(const std::string& text, const RecordSchema& schema = tiny_schema()) {
  return bind(parse_formula(text), schema);
}

Outcome run_monitor(const Formula& f, const std::vector<StateRecord>& trace) {
  Monitor m(std::make_shared<const Formula>(f));
  for (const auto& r : trace) {
    if (m.final()) break;
    m.step(r);
  }
  return m.outcome();
}

}  // namespace

TEST(Bltl, ParsesRequirementShapes) {
  const auto f1 = parse_formula("G[1440] trains(T_01BC) <= 1");
  EXPECT_EQ(f1.temporal, Temporal::globally);
  EXPECT_EQ(f1.bound, 1440u);
  EXPECT_EQ(f1.nodes[static_cast<std::size_t>(f1.root)].op, Op::compare);
  EXPECT_EQ(f1.nodes[static_cast<std::size_t>(f1.root)].cmp, Cmp::le);
  EXPECT_FALSE(f1.uses_next);

  const auto f2 = parse_formula("G[1440] (trains(T_01BC) == 1) => (point(P_02AC) == next(point(P_02AC)))");
  EXPECT_EQ(f2.nodes[static_cast<std::size_t>(f2.root)].op, Op::implies);
  EXPECT_TRUE(f2.uses_next);

  const auto f4 = parse_formula("GF[1440,240] route(R_CC_101) == set");
  EXPECT_EQ(f4.temporal, Temporal::globally_finally);
  EXPECT_EQ(f4.bound, 1440u);
  EXPECT_EQ(f4.window, 240u);

  const auto bare = parse_formula("sub(U_CGC_20C) == free");
  EXPECT_EQ(bare.temporal, Temporal::none);
  EXPECT_EQ(parse_formula("uir(U_IR(09C)) == locked").nodes.front().name, "U_IR(09C)");
}

TEST(Bltl, Precedence) {
  // & binds tighter than |, which binds tighter than =>.
  EXPECT_EQ(parse_formula("true | false & false"), parse_formula("true | (false & false)"));
  EXPECT_EQ(parse_formula("true => false | true"), parse_formula("true => (false | true)"));
  EXPECT_EQ(parse_formula("!true & false"), parse_formula("(!true) & false"));
  EXPECT_EQ(parse_formula("!trains(T_1) == 1"), parse_formula("!(trains(T_1) == 1)"));
  EXPECT_EQ(parse_formula("G[5] route(R_A) ≠ set ∧ true"), parse_formula("G[5] route(R_A) != set & true"));
}

TEST(Bltl, Errors) {
  EXPECT_THROW(parse_formula("F[10] true"), UnknownOperator);
  EXPECT_THROW(parse_formula("G[10] speed(T_1) > 3"), UnknownOperator);
  EXPECT_THROW(parse_formula("G[0] true"), SyntaxError);
  EXPECT_THROW(parse_formula("GF[10] true"), SyntaxError);
  EXPECT_THROW(parse_formula("G[10] trains(T_1) <= set"), SyntaxError);
  EXPECT_THROW(parse_formula("point(P_1) < normal"), SyntaxError);
  EXPECT_THROW(parse_formula("next(next(point(P_1))) == normal"), SyntaxError);
  EXPECT_THROW(parse_formula("G[10] G[5] true"), SyntaxError);
  EXPECT_THROW(parse_formula("trains(T_1) <= 1 extra"), SyntaxError);
  EXPECT_THROW(parse_formula(""), SyntaxError);
}

TEST(Bltl, PrintRoundTrip) {
  std::mt19937_64 rng(5);
  const auto schema = tiny_schema();
  for (int i = 0; i < 2000; ++i) {
    const auto text = interlock::testing::random_formula(rng, schema, 4);
    const auto f = parse_formula(text);
    ASSERT_EQ(parse_formula(print_formula(f)), f) << text << "\n" << print_formula(f);
  }
}

TEST(Bltl, BindResolvesNames) {
  EXPECT_NO_THROW(bound("trains(T_2) == 0"));
  EXPECT_THROW(bound("trains(T_9) == 0"), UnknownTrack);
  EXPECT_THROW(bound("route(R_Z) == set"), UnknownRoute);
  EXPECT_THROW(bound("point(P_9) == normal"), LinkError);
}

TEST(Bltl, GloballyViolatedAtFirstBadRecord) {
  TraceBuilder b;
  for (std::uint64_t i = 0; i < 4; ++i) b.push(i);
  b.cur.tracks[0] = 2;  // fifth record
  b.push(4).push(5);
  const auto f = bound("G[100] trains(T_1) <= 1");
  EXPECT_EQ(run_monitor(f, b.trace), (Outcome{Verdict::violated, 4}));
  EXPECT_EQ(evaluate_trace(f, b.trace), (Outcome{Verdict::violated, 4}));
}

TEST(Bltl, GloballyHoldsWhenNbPassesBound) {
  TraceBuilder b;
  for (std::uint64_t nb : {0, 1, 1, 2, 3, 3, 4}) b.push(nb);
  const auto f = bound("G[3] trains(T_1) <= 1");
  EXPECT_EQ(run_monitor(f, b.trace), (Outcome{Verdict::holds, 6}));
  // The record with nb equal to the bound is still checked.
  TraceBuilder c;
  c.push(0).push(3);
  c.cur.tracks[0] = 2;
  c.push(3).push(4);
  EXPECT_EQ(run_monitor(f, c.trace), (Outcome{Verdict::violated, 2}));
  // A bad record beyond the bound is never seen.
  TraceBuilder d;
  d.push(0).push(3);
  d.cur.tracks[0] = 2;
  d.push(4);
  EXPECT_EQ(run_monitor(f, d.trace), (Outcome{Verdict::holds, 2}));
}

TEST(Bltl, NextIsJudgedOnTheFollowingRecord) {
  const auto f = bound("G[10] (trains(T_1) == 1) => (point(P_1) == next(point(P_1)))");
  TraceBuilder b;
  b.push(0);
  b.cur.tracks[0] = 1;
  b.push(1);
  b.cur.points[0] = 1;  // point moves under the train
  b.push(2).push(3);
  Monitor m(std::make_shared<const Formula>(f));
  EXPECT_EQ(m.step(b.trace[0]), Verdict::pending);
  EXPECT_EQ(m.step(b.trace[1]), Verdict::pending);
  EXPECT_EQ(m.step(b.trace[2]), Verdict::violated);
  EXPECT_EQ(m.outcome().index, 1u);
  EXPECT_THROW(m.step(b.trace[3]), MonitorFinished);
}

TEST(Bltl, PointSetForMoveHandBuilt) {
  // A train moving from T_092 to T_01BC with P_01BC set left and staying left.
  RecordSchema s;
  s.points = {"P_01BC"};
  s.tracks = {"T_01BC", "T_092"};
  const auto f = bound(
      "G[3] (trains(T_092) == 1 & trains(T_01BC) == 0 & next(trains(T_092)) == 0 & "
      "next(trains(T_01BC)) == 1) => (point(P_01BC) == left & next(point(P_01BC)) == left)",
      s);
  StateRecord r;
  r.points = {0};
  r.tracks = {0, 1};
  r.nb = 1;
  std::vector<StateRecord> trace{r};
  r.tracks = {1, 0};
  r.nb = 2;
  trace.push_back(r);
  r.tracks = {0, 0};
  r.nb = 4;
  trace.push_back(r);
  EXPECT_EQ(evaluate_trace(f, trace).verdict, Verdict::holds);
  EXPECT_EQ(run_monitor(f, trace).verdict, Verdict::holds);

  trace[1].points = {1};
  EXPECT_EQ(evaluate_trace(f, trace), (Outcome{Verdict::violated, 0}));
}

TEST(Bltl, GloballyFinally) {
  const auto always = bound("GF[3,2] route(R_A) == unset");
  TraceBuilder b;
  for (std::uint64_t nb : {0, 1, 2, 3, 4}) b.push(nb);
  EXPECT_EQ(run_monitor(always, b.trace).verdict, Verdict::holds);

  // Set at nb 1 and never unset again: the obligation expires after nb 3.
  const auto f = bound("GF[10,2] route(R_A) == unset");
  TraceBuilder c;
  c.push(0);
  c.cur.routes[0] = 1;
  c.push(1).push(2).push(3).push(4);
  EXPECT_EQ(run_monitor(f, c.trace), (Outcome{Verdict::violated, 4}));
  EXPECT_EQ(evaluate_trace(f, c.trace), (Outcome{Verdict::violated, 4}));

  // Unset again within the window: fine.
  TraceBuilder d;
  d.push(0);
  d.cur.routes[0] = 1;
  d.push(1).push(2);
  d.cur.routes[0] = 0;
  d.push(3).push(11);
  EXPECT_EQ(run_monitor(f, d.trace).verdict, Verdict::holds);
}

TEST(Bltl, TraceTooShort) {
  TraceBuilder b;
  b.push(0);
  EXPECT_THROW(evaluate_trace(bound("GF[10,2] true"), b.trace), TraceTooShort);
  EXPECT_THROW(evaluate_trace(bound("G[10] true"), b.trace), TraceTooShort);
  EXPECT_EQ(evaluate_trace(bound("true"), b.trace).verdict, Verdict::holds);
}

TEST(Bltl, StalledTraceIsClosed) {
  TraceBuilder b;
  b.push(0).push(1);
  const auto g = bound("G[10] trains(T_1) <= 1");
  EXPECT_EQ(evaluate_trace(g, b.trace, TraceEnd::stalled), (Outcome{Verdict::holds, 2}));
  // A route left set forever violates its availability formula.
  b.cur.routes[0] = 1;
  b.push(2);
  const auto gf = bound("GF[10,2] route(R_A) == unset");
  EXPECT_EQ(evaluate_trace(gf, b.trace, TraceEnd::stalled).verdict, Verdict::violated);
  Monitor m(std::make_shared<const Formula>(gf));
  for (const auto& r : b.trace) m.step(r);
  EXPECT_EQ(m.close_stalled(b.trace.back()), Verdict::violated);
}

// Truncating a trace at the verdict index keeps evaluate_trace's verdict for G.
TEST(Bltl, EarlyStopIsSound) {
  std::mt19937_64 rng(17);
  const auto schema = tiny_schema();
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    auto text = interlock::testing::random_formula(rng, schema, 3);
    if (text.rfind("G[", 0) != 0) continue;
    const auto f = bind(parse_formula(text), schema);
    const auto trace = interlock::testing::random_trace(rng, schema, 1 + rng() % 40);
    Outcome full;
    try {
      full = evaluate_trace(f, trace);
    } catch (const TraceTooShort&) {
      continue;
    }
    std::vector<StateRecord> cut(trace.begin(), trace.begin() + static_cast<std::ptrdiff_t>(
                                                                  std::min(trace.size(), full.index + 1)));
    // A next-using body judged at index i needs record i + 1.
    if (f.uses_next && full.verdict == Verdict::violated && full.index + 2 <= trace.size()) {
      cut.push_back(trace[full.index + 1]);
    }
    ASSERT_EQ(evaluate_trace(f, cut), full) << text;
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

TEST(Bltl, MonitorMatchesReference) {
  std::mt19937_64 rng(99);
  const auto schema = tiny_schema();
  for (int i = 0; i < 2000; ++i) {
    const auto text = interlock::testing::random_formula(rng, schema, 4);
    const auto f = bind(parse_formula(text), schema);
    const auto trace = interlock::testing::random_trace(rng, schema, 1 + rng() % 50);
    std::string why;
    ASSERT_TRUE(interlock::testing::oracle_agrees(f, trace, &why)) << text << ": " << why;
  }
}

TEST(Bltl, MonitorSetSharesRecords) {
  const auto schema = tiny_schema();
  std::vector<std::shared_ptr<const Formula>> fs = {
      std::make_shared<const Formula>(bound("G[3] trains(T_1) <= 1")),
      std::make_shared<const Formula>(bound("G[3] point(P_1) == next(point(P_1))"))};
  MonitorSet set(fs);
  std::mt19937_64 rng(1);
  const auto trace = interlock::testing::random_trace(rng, schema, 30);
  for (const auto& r : trace) {
    if (set.all_final()) break;
    set.observe(StateRecord(r));
  }
  for (std::size_t i = 0; i < fs.size(); ++i) {
    Outcome ref;
    try {
      ref = evaluate_trace(*fs[i], trace);
    } catch (const TraceTooShort&) {
      continue;
    }
    EXPECT_EQ(set.monitors()[i].outcome(), ref);
  }
}

TEST(Bltl, PropertyFiles) {
  const auto props = parse_property_file(
      "# header comment\n"
      "G[1440] trains(T_1) <= 1  # (1) no collision on T_1\n"
      "\n"
      "GF[1440,240] sub(U_A) == free # (5) U_A eventually free\n"
      "route(R_A) == unset\n");
  ASSERT_EQ(props.size(), 3u);
  EXPECT_EQ(props[0].cls, 1);
  EXPECT_EQ(props[0].name, "no collision on T_1");
  EXPECT_EQ(props[1].cls, 5);
  EXPECT_EQ(props[2].cls, 0);
  EXPECT_FALSE(props[2].name.empty());
  const auto again = parse_property_file(print_property_file(props));
  ASSERT_EQ(again.size(), props.size());
  for (std::size_t i = 0; i < props.size(); ++i) {
    EXPECT_EQ(again[i].formula, props[i].formula);
    EXPECT_EQ(again[i].cls, props[i].cls);
    EXPECT_EQ(again[i].name, props[i].name);
  }
  EXPECT_THROW(parse_property_file("G[10] bogus(T_1) == 1\n"), UnknownOperator);
}
