/*
 * Copyright (c) 2026, The threatflow authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "threatflow/threatflow.hpp"

using namespace threatflow;

namespace {

Value rec(std::vector<std::pair<std::string, Value>> f) { return Value::record(std::move(f)); }

// P --[x]--> T --[x]--> Q
Net relay(Tick delay = 0) {
  Net n;
  n.name = "relay";
  n.add_place("P", ColorSet::text());
  n.add_place("Q", ColorSet::text());
  n.add_transition("T", ex::truth(), delay);
  n.arc_in("P", "T", Pattern::bind("x"));
  n.arc_out("T", "Q", ex::var("x"));
  return n;
}

}  // namespace

TEST(Value, StructuralEqualityAndOrder) {
  EXPECT_EQ(rec({{"un", text("sm")}, {"pw", text("t1")}}), rec({{"un", text("sm")}, {"pw", text("t1")}}));
  EXPECT_NE(rec({{"un", text("sm")}}), rec({{"un", text("sn")}}));
  EXPECT_LT(text("a"), text("b"));
  EXPECT_LT(count(2), count(10));
  EXPECT_NE(text("1"), count(1));
  EXPECT_THROW(Value::record({{"a", count(1)}, {"a", count(2)}}), TypeMismatch);
}

TEST(Value, CompactRendering) {
  EXPECT_EQ(rec({{"un", text("sm")}, {"pw", text("t1")}}).str(), R"({un="sm",pw="t1"})");
  EXPECT_EQ(Value::tuple({text("a"), count(3)}).str(), R"(("a",3))");
  EXPECT_EQ(text("q\"x").str(), R"("q\"x")");
}

TEST(Value, JsonRoundTrip) {
  const Value v = rec({{"loc", text("host-1")}, {"ips", Value::tuple({text("10.0.0.1")})}, {"n", count(4)}});
  EXPECT_EQ(value_from_json(to_json(v)), v);
  EXPECT_THROW(value_from_json(Json(1.5)), ParseError);
}

TEST(ColorSet, Membership) {
  const auto cred = ColorSet::record({{"un", ColorSet::text()}, {"pw", ColorSet::text()}});
  EXPECT_TRUE(cred.contains(rec({{"un", text("sm")}, {"pw", text("t1")}})));
  EXPECT_FALSE(cred.contains(rec({{"pw", text("t1")}, {"un", text("sm")}})));
  EXPECT_FALSE(cred.contains(count(1)));
  const auto ips = ColorSet::list(ColorSet::text());
  EXPECT_TRUE(ips.contains(Value::tuple({})));
  EXPECT_TRUE(ips.contains(Value::tuple({text("a"), text("b")})));
  EXPECT_FALSE(ips.contains(Value::tuple({count(1)})));
  EXPECT_EQ(ColorSet::from_json(cred.to_json()), cred);
  EXPECT_EQ(ColorSet::from_json(ips.to_json()), ips);
}

TEST(Marking, MultisetCounts) {
  Marking m;
  m.add("P", text("a"), 0, 2);
  m.add("P", text("a"), 3);
  EXPECT_EQ(m.size("P"), 3);
  EXPECT_EQ(m.count_value("P", text("a")), 3);
  EXPECT_FALSE(m.remove("P", TimedToken{text("a"), 0}, 3));
  EXPECT_TRUE(m.remove("P", TimedToken{text("a"), 0}, 2));
  EXPECT_TRUE(m.remove("P", TimedToken{text("a"), 3}));
  EXPECT_TRUE(m.empty());
  EXPECT_EQ(m, Marking{});
}

TEST(Marking, CanonicalKeyAndJson) {
  Marking a;
  a.add("Q", text("x"));
  a.add("P", count(1), 4, 2);
  Marking b;
  b.add("P", count(1), 4);
  b.add("Q", text("x"));
  b.add("P", count(1), 4);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str(), "P:2`1@4 ;Q:\"x\" ;");
  EXPECT_EQ(marking_from_json(to_json(a)), a);
}

TEST(Expr, ValueOperators) {
  Vars vars{{"h", rec({{"loc", text("host-1")}})}, {"im", text("img")}, {"n", count(3)}};
  const Expr cfg = ex::concat({ex::tuple({ex::var("h")}), ex::tuple({ex::var("im")})});
  EXPECT_EQ(evaluate(cfg, vars), Value::tuple({vars["h"], text("img")}));
  EXPECT_EQ(evaluate(ex::field("h", "loc"), vars), text("host-1"));
  EXPECT_EQ(evaluate(ex::sub(ex::var("n"), ex::lit(1)), vars), count(2));
  EXPECT_EQ(evaluate(ex::with(ex::var("h"), {{"loc", ex::lit("host-2")}}), vars), rec({{"loc", text("host-2")}}));
  EXPECT_EQ(evaluate(ex::if_(ex::gt(ex::var("n"), ex::lit(2)), ex::lit("big"), ex::lit("small")), vars), text("big"));
  EXPECT_THROW(evaluate(ex::var("zz"), vars), EvalError);
  EXPECT_THROW(evaluate(ex::field("im", "loc"), vars), EvalError);
}

TEST(Expr, PlaceReads) {
  Marking m;
  m.add("On", text("sm"));
  m.add("AR", rec({{"rank", count(1)}, {"free", count(0)}}));
  m.add("AR", rec({{"rank", count(2)}, {"free", count(1)}}));
  Vars vars{{"u", text("sm")}};
  EXPECT_TRUE(holds(ex::in(ex::var("u"), "On"), vars, &m));
  EXPECT_FALSE(holds(ex::in(ex::lit("zz"), "On"), vars, &m));
  const Expr free_below = ex::exists("AR", "o", ex::all({ex::lt(ex::field("o", "rank"), ex::lit(2)),
                                                         ex::gt(ex::field("o", "free"), ex::lit(0))}));
  EXPECT_FALSE(holds(free_below, vars, &m));
  std::set<std::string> fv;
  free_vars(free_below, fv);
  EXPECT_TRUE(fv.empty());
}

TEST(Expr, JsonRoundTrip) {
  const Expr e = ex::all({ex::eq(ex::var("U"), ex::var("C")), ex::not_(ex::in(ex::field("U", "un"), "On_Usrs")),
                          ex::exists("AR", "o", ex::lt(ex::field("o", "rank"), ex::lit(2)))});
  EXPECT_EQ(Expr::from_json(e.to_json()), e);
  const Expr w = ex::with(ex::record({{"a", ex::lit(1)}}), {{"a", ex::add(ex::lit(1), ex::lit(2))}});
  EXPECT_EQ(Expr::from_json(w.to_json()), w);
  EXPECT_THROW(Expr::from_json(Json::parse(R"(["frob", 1])")), ParseError);
  EXPECT_THROW(Expr::from_json(Json::parse(R"(["eq", 1])")), ParseError);
}

TEST(Pattern, MatchAndBind) {
  Vars vars;
  const Pattern p = Pattern::record({{"un", Pattern::bind("u")}, {"cpu", Pattern::lit(text("2x"))}});
  EXPECT_TRUE(p.match(rec({{"un", text("sm")}, {"cpu", text("2x")}, {"ram", count(1)}}), vars));
  EXPECT_EQ(vars.at("u"), text("sm"));
  Vars other{{"u", text("zz")}};
  EXPECT_FALSE(p.match(rec({{"un", text("sm")}, {"cpu", text("2x")}}), other));
  EXPECT_EQ(Pattern::from_json(p.to_json()), p);
}

TEST(Validate, ReportsDefects) {
  Net n = relay();
  EXPECT_TRUE(validate_net(n).empty());
  n.arc_out("T", "Q", ex::var("x2"));
  auto d = validate_net(n);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].kind, NetDefect::Kind::UnboundVariable);
  EXPECT_EQ(d[0].subject, "x2");

  Net dangling = relay();
  dangling.arc_in("Nowhere", "T", Pattern::wild());
  EXPECT_EQ(validate_net(dangling).at(0).kind, NetDefect::Kind::DanglingArc);

  Net outer;
  outer.add_place("S", ColorSet::text());
  Net inner;
  inner.add_place("I", ColorSet::count());
  outer.submodules.push_back({"sub", std::make_shared<const Net>(inner)});
  outer.fusions.push_back({"sub", "S", "I"});
  d = validate_net(outer);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].kind, NetDefect::Kind::FusionTypeMismatch);
  EXPECT_THROW(flatten(outer), InvalidNet);
}

TEST(Enabled, EmptyPlaceGivesNothing) {
  EXPECT_TRUE(enabled_bindings(relay(), Marking{}, "T", 0).empty());
  EXPECT_THROW(enabled_bindings(relay(), Marking{}, "nope", 0), UnknownTransition);
}

TEST(Enabled, CartesianProduct) {
  Net n;
  n.add_place("A", ColorSet::text());
  n.add_place("B", ColorSet::text());
  n.add_transition("T");
  n.arc_in("A", "T", Pattern::bind("a"));
  n.arc_in("B", "T", Pattern::bind("b"));
  n.initial.add("A", text("a1"));
  n.initial.add("A", text("a2"));
  n.initial.add("B", text("b1"));
  n.initial.add("B", text("b2"));
  const auto got = enabled_bindings(n, n.initial, "T", 0);
  EXPECT_EQ(got.size(), 4u);
  EXPECT_EQ(got, oracle::enabled_bindings(n, n.initial, "T", 0));
}

TEST(Enabled, ReadArcsCountAgainstAvailability) {
  Net n;
  n.add_place("A", ColorSet::text());
  n.add_transition("T");
  n.arc_in("A", "T", Pattern::bind("x"));
  n.arc_read("A", "T", Pattern::bind("y"));
  n.initial.add("A", text("k"));
  EXPECT_TRUE(enabled_bindings(n, n.initial, "T", 0).empty());
  n.initial.add("A", text("k"));
  EXPECT_EQ(enabled_bindings(n, n.initial, "T", 0).size(), 1u);
}

TEST(Fire, IdentityTransitionKeepsMarking) {
  Net n;
  n.add_place("P", ColorSet::text());
  n.add_transition("T");
  n.arc_in("P", "T", Pattern::bind("x"));
  n.arc_out("T", "P", ex::var("x"));
  n.initial.add("P", text("a"));
  const auto b = enabled_bindings(n, n.initial, "T", 0);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(fire(n, n.initial, "T", b[0], 0), n.initial);
}

TEST(Fire, DelayStampsOutputs) {
  Net n = relay(5);
  n.add_place("R", ColorSet::text());
  n.add_transition("U");
  n.arc_in("Q", "U", Pattern::bind("y"));
  n.arc_out("U", "R", ex::var("y"));
  n.initial.add("P", text("a"));
  Engine e(n);
  const auto b = e.enabled(n.initial, "T", 10);
  ASSERT_EQ(b.size(), 1u);
  const Marking after = e.fire(n.initial, "T", b[0], 10);
  EXPECT_EQ(after.count("Q", TimedToken{text("a"), 15}), 1);
  EXPECT_TRUE(e.enabled(after, "U", 14).empty());
  EXPECT_EQ(e.enabled(after, "U", 15).size(), 1u);
  EXPECT_EQ(e.next_instant(after, 10), Tick{15});
}

TEST(Fire, RejectsStaleBinding) {
  Net n = relay();
  n.initial.add("P", text("a"));
  Engine e(n);
  const auto b = e.enabled(n.initial, "T", 0).at(0);
  const Marking after = e.fire(n.initial, "T", b, 0);
  EXPECT_THROW(e.fire(after, "T", b, 0), NotEnabled);
}

TEST(Fire, OutputTypeIsChecked) {
  Net n = relay();
  n.add_place("C", ColorSet::count());
  n.arc_out("T", "C", ex::var("x"));
  n.initial.add("P", text("a"));
  Engine e(n);
  EXPECT_THROW(e.fire(n.initial, "T", e.enabled(n.initial, "T", 0).at(0), 0), TypeMismatch);
}

TEST(Step, DeadMarkingStops) {
  std::mt19937_64 rng(0);
  EXPECT_FALSE(step(relay(), Marking{}, 0, rng).has_value());
}

TEST(Step, SingletonChoiceIgnoresSeed) {
  Net n = relay();
  n.initial.add("P", text("a"));
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    std::mt19937_64 rng(seed);
    auto r = step(n, n.initial, 0, rng);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->transition, "T");
  }
}

TEST(Step, AdvancesClockToNextEnabling) {
  Net n = relay();
  n.initial.add("P", text("a"), 7);
  std::mt19937_64 rng(0);
  auto r = step(n, n.initial, 0, rng);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->clock, 7);
}

TEST(Step, SameSeedSameTrace) {
  Net n;
  n.add_place("P", ColorSet::count());
  n.add_transition("inc");
  n.add_transition("dec");
  n.arc_in("P", "inc", Pattern::bind("x"));
  n.arc_out("inc", "P", ex::if_(ex::lt(ex::var("x"), ex::lit(5)), ex::add(ex::var("x"), ex::lit(1)), ex::lit(0)));
  n.arc_in("P", "dec", Pattern::bind("y"));
  n.arc_out("dec", "P", ex::if_(ex::gt(ex::var("y"), ex::lit(0)), ex::sub(ex::var("y"), ex::lit(1)), ex::lit(5)));
  n.initial.add("P", count(0));
  n.initial.add("P", count(3));
  auto run = [&] {
    Engine e(n);
    std::mt19937_64 rng(42);
    std::string trace;
    Marking m = n.initial;
    Tick clock = 0;
    for (int i = 0; i < 1000; ++i) {
      auto r = e.step(m, clock, rng);
      if (!r) break;
      trace += r->transition + r->binding.digest() + ";";
      m = std::move(r->marking);
      clock = r->clock;
    }
    return trace;
  };
  EXPECT_EQ(run(), run());
}

TEST(Flatten, NoSubmodulesIsIdentity) {
  Net n = relay();
  n.initial.add("P", text("a"));
  EXPECT_EQ(flatten(n), n);
}

TEST(Flatten, TwoLevelNestingMatchesManualFlattening) {
  // leaf: In --[x]--> move --[x]--> Out ; mid fuses leaf.In to its X ; top fuses mid.X to S.
  Net leaf;
  leaf.add_place("In", ColorSet::text());
  leaf.add_place("Out", ColorSet::text());
  leaf.add_transition("move");
  leaf.arc_in("In", "move", Pattern::bind("x"));
  leaf.arc_out("move", "Out", ex::var("x"));
  leaf.initial.add("In", text("b"));
  Net mid;
  mid.add_place("X", ColorSet::text());
  mid.submodules.push_back({"leaf", std::make_shared<const Net>(leaf)});
  mid.fusions.push_back({"leaf", "X", "In"});
  Net top;
  top.add_place("S", ColorSet::text());
  top.initial.add("S", text("a"));
  top.submodules.push_back({"mid", std::make_shared<const Net>(mid)});
  top.fusions.push_back({"mid", "S", "X"});

  Net manual;
  manual.add_place("S", ColorSet::text());
  manual.places.push_back(Place{"mid/leaf/Out", "mid/leaf/Out", ColorSet::text(), std::nullopt});
  manual.transitions.push_back(Transition{"mid/leaf/move", "mid/leaf/move", ex::truth(), 0});
  manual.arc_in("S", "mid/leaf/move", Pattern::bind("x"));
  manual.arc_out("mid/leaf/move", "mid/leaf/Out", ex::var("x"));
  manual.initial.add("S", text("a"));
  manual.initial.add("S", text("b"));

  const Net flat = flatten(top);
  EXPECT_EQ(flat.places, manual.places);
  EXPECT_EQ(flat.initial, manual.initial);
  Engine e(flat);
  std::mt19937_64 rng(0);
  Marking m = flat.initial;
  while (auto r = e.step(m, 0, rng)) m = r->marking;
  Marking terminal;
  terminal.add("mid/leaf/Out", text("a"));
  terminal.add("mid/leaf/Out", text("b"));
  EXPECT_EQ(m, terminal);
}

TEST(NetIo, RoundTripIsIdentity) {
  Net n = relay(3);
  n.places[0].layer = "control";
  n.transitions[0].guard = ex::ne(ex::var("x"), ex::lit("bad"));
  n.arc_out("T", "P", ex::var("x"), 2, ex::eq(ex::var("x"), ex::lit("again")));
  n.arc_read("Q", "T", Pattern::wild());
  n.initial.add("P", text("a"), 2, 3);
  Net outer;
  outer.name = "outer";
  outer.add_place("S", ColorSet::text());
  outer.submodules.push_back({"r", std::make_shared<const Net>(n)});
  outer.fusions.push_back({"r", "S", "P"});
  const Json j = net_to_json(outer);
  const Net back = net_from_json(j);
  EXPECT_EQ(back, outer);
  EXPECT_EQ(net_to_json(back).dump(), j.dump());
  EXPECT_THROW(net_from_json(Json::parse(R"({"places": 3})")), ParseError);
}

TEST(Property, EnabledMatchesCartesianOracle) {
  oracle::Gen gen(7);
  int compared = 0;
  for (int i = 0; i < 150; ++i) {
    const Net n = gen.net();
    ASSERT_TRUE(validate_net(n).empty()) << net_to_json(n).dump();
    Engine e(n);
    for (Tick clock : {Tick{0}, Tick{1}}) {
      for (const auto& t : n.transitions) {
        const auto got = e.enabled(n.initial, t.id, clock);
        ASSERT_EQ(got, oracle::enabled_bindings(n, n.initial, t.id, clock)) << net_to_json(n).dump();
        for (const auto& b : got) {
          EXPECT_EQ(e.fire_unchecked(n.initial, t.id, b, clock), oracle::expected_after(n, n.initial, t.id, b, clock));
          ++compared;
        }
      }
    }
  }
  EXPECT_GT(compared, 50);
}
