#include <set>

#include "doctest.h"
#include "eapr/model_io.hpp"
#include "eapr/semantics.hpp"
#include "gen.hpp"

using namespace eapr;

namespace {

ModModel one_world(std::map<std::string, Rational> vals) {
  ModModel m;
  m.frame = EventModel::with_worlds(1);
  for (auto& [p, q] : vals) m.v[p] = {q};
  return m;
}

SIModel tiny_si(const Rational& px) {
  // one outer world, two inner worlds, p true at x0 only
  SIModel m;
  m.outer = EventModel::with_worlds(1);
  m.inner = EventModel::with_worlds(2);
  m.inner.set_truth("p", 0, true);
  m.mu[{0, "A"}] = {px, 1 - px};
  return m;
}

}  // namespace

TEST_CASE("denote: base, knowledge and vacuous box") {
  EventModel m = EventModel::with_worlds(3);
  m.set_truth("p", 1, true);
  CHECK(denote(Event::var("p"), m) == WorldSet{0, 1, 0});
  m.set_truth("p", 0, true);
  m.set_classes("A", {{0, 1}, {2}});
  CHECK(denote(parse_event("K_A p"), m) == WorldSet{1, 1, 0});
  CHECK(holds(parse_event("[a]p"), m, 0));  // no a-successors
  CHECK(denote(parse_event("q"), m) == WorldSet{0, 0, 0});  // unknown variable
}

TEST_CASE("eval: connective clauses") {
  ModModel m = one_world({{"a", Rational(7, 10)}, {"b", Rational(4, 10)}, {"c", Rational(8, 10)}, {"h", Rational(1, 2)}});
  CHECK(eval_mod(parse_mod("1/2"), m, 0) == Rational(1, 2));
  CHECK(eval_mod(parse_mod("a -> b"), m, 0) == Rational(7, 10));
  CHECK(eval_mod(parse_mod("c => b"), m, 0) == Rational(1, 2));
  CHECK(eval_mod(parse_mod("h * h"), m, 0) == Rational(1, 4));
  CHECK(eval_mod(parse_mod("b => c"), m, 0) == 1);
  ModModel d = one_world({{"p", Rational(99, 100)}});
  CHECK(eval_mod(parse_mod("D p"), d, 0) == 0);
  ModModel h = one_world({{"p", Rational(1, 2)}});
  CHECK(eval_mod(parse_mod("!!((p -> !p) -> !p)"), h, 0) == Rational(1, 2));
}

TEST_CASE("eval: knowledge is a minimum over the class") {
  ModModel m;
  m.frame = EventModel::with_worlds(2);
  m.frame.set_classes("A", {{0, 1}});
  m.v["p"] = {Rational(3, 10), Rational(8, 10)};
  CHECK(eval_mod(parse_mod("K_A p"), m, 0) == Rational(3, 10));
  CHECK(eval_mod(parse_mod("Kd_A p"), m, 0) == Rational(8, 10));
}

TEST_CASE("eval: derived connectives match their closed forms on a grid") {
  std::vector<Rational> grid{0, Rational(1, 4), Rational(1, 2), Rational(3, 4), 1};
  for (const auto& a : grid)
    for (const auto& b : grid) {
      ModModel m = one_world({{"p", a}, {"q", b}});
      CHECK(eval_mod(Formula::one(), m, 0) == 1);
      CHECK(eval_mod(Formula::zero(), m, 0) == 0);
      CHECK(eval_mod(parse_mod("p + q"), m, 0) == min_q(Rational(1), a + b));
      CHECK(eval_mod(parse_mod("p (.) q"), m, 0) == max_q(Rational(0), a + b - 1));
      CHECK(eval_mod(parse_mod("D p"), m, 0) == (a == 1 ? 1 : 0));
      CHECK(eval_mod(Formula::dyadic(Rational(3, 4)), m, 0) == Rational(3, 4));
      CHECK(eval_mod(Formula::dyadic(Rational(5, 8)), m, 0) == Rational(5, 8));
    }
}

TEST_CASE("eval_prob: Pr atom is the measure of the denotation") {
  SIModel m = tiny_si(Rational(1, 2));
  CHECK(eval_prob(parse_prob("Pr_A(p)"), m, 0) == Rational(1, 2));
  CHECK(eval_prob(parse_prob("1/2"), m, 0) == Rational(1, 2));
  SIModel bad = tiny_si(Rational(1, 2));
  bad.mu.clear();
  CHECK_THROWS(eval_prob(parse_prob("Pr_A(p)"), bad, 0));
}

TEST_CASE("properties on random SI models") {
  testgen::GenOptions o;
  o.agents = {"A", "B"};
  o.actions = {"a"};
  testgen::Gen g(11, o);
  for (int i = 0; i < 200; ++i) {
    SIModel m = g.si_model(g.uniform(1, 3), g.uniform(1, 4));
    m.validate();
    Event a = g.event();
    for (int w = 0; w < m.outer.size(); ++w) {
      Rational pa = eval_prob(Formula::pr("A", a), m, w);
      Rational pna = eval_prob(Formula::pr("A", Event::neg(a)), m, w);
      CHECK(pa + pna == 1);
      Event p = Event::var("p"), q = Event::var("q");
      CHECK(eval_prob(Formula::pr("B", Event::conj(p, q)), m, w) <= eval_prob(Formula::pr("B", p), m, w));
      Formula f = g.prob();
      CHECK(eval_prob(Formula::knows("A", f), m, w) <= eval_prob(f, m, w));
      Rational d = eval_prob(Formula::delta(f), m, w);
      CHECK((d == 0 || d == 1));
      CHECK((d == 1) == (eval_prob(f, m, w) == 1));
      // box over Pr is the lower probability over the successors' measures
      Formula box = Formula::knows("A", Formula::pr("B", a));
      std::vector<std::vector<Rational>> ms;
      for (int u : m.outer.eclass("A", w)) ms.push_back(m.measure(u, "B"));
      CHECK(eval_prob(box, m, w) == lower_upper(ms, denote(a, m.inner)).first);
    }
  }
}

TEST_CASE("si_to_standard preserves values") {
  SIModel m = tiny_si(Rational(1, 3));
  StandardModel s = si_to_standard(m);
  CHECK(s.frame.size() == 3);
  CHECK(eval_standard(parse_prob("Pr_A(p)"), s, 0) == Rational(1, 3));

  SIModel e = tiny_si(Rational(1, 3));
  e.outer.R["a"].assign(1, {});
  CHECK(eval_standard(parse_prob("[a]Pr_A(p)"), si_to_standard(e), 0) == 1);

  testgen::GenOptions o;
  o.agents = {"A", "B"};
  o.actions = {"a", "b"};
  testgen::Gen g(5, o);
  for (int i = 0; i < 200; ++i) {
    SIModel r = g.si_model(g.uniform(1, 3), g.uniform(1, 3));
    Formula f = g.prob();
    StandardModel st = si_to_standard(r);
    for (int w = 0; w < r.outer.size(); ++w) REQUIRE(eval_prob(f, r, w) == eval_standard(f, st, w));
  }
}

TEST_CASE("lower_upper") {
  WorldSet x{1, 0};
  CHECK(lower_upper({{Rational(1, 3), Rational(2, 3)}}, x) == std::make_pair(Rational(1, 3), Rational(1, 3)));
  CHECK(lower_upper({{1, 0}, {0, 1}}, x) == std::make_pair(Rational(0), Rational(1)));
  CHECK_THROWS(lower_upper({}, x));
}

TEST_CASE("entails_on_model") {
  Formula phi = parse_mod("p -> K_A q");
  ModModel m = one_world({{"p", Rational(1, 2)}, {"q", 1}});
  CHECK(entails_on_model({phi}, phi, m, 0));
  Formula bad = parse_mod("!!!((p -> !p) -> !p)");
  testgen::Gen g(3);
  for (int i = 0; i < 50; ++i) {
    ModModel r = g.mod_model(g.uniform(1, 3));
    CHECK(entails_on_model({Formula::var("q"), bad}, Formula::zero(), r, 0));
  }
  ModModel h = one_world({{"p", Rational(1, 2)}, {"q", 1}});
  CHECK_FALSE(entails_on_model({Formula::var("q")}, parse_mod("!!((p -> !p) -> !p)"), h, 0));
}

TEST_CASE("model JSON round trip") {
  testgen::GenOptions o;
  o.agents = {"A", "B"};
  testgen::Gen g(9, o);
  for (int i = 0; i < 20; ++i) {
    SIModel m = g.si_model(3, 3);
    SIModel back = si_model_from_json(to_json(m));
    Formula f = g.prob();
    for (int w = 0; w < 3; ++w) CHECK(eval_prob(f, m, w) == eval_prob(f, back, w));
    ModModel mm = g.mod_model(3);
    ModModel mback = mod_model_from_json(to_json(mm));
    Formula h = g.mod();
    for (int w = 0; w < 3; ++w) CHECK(eval_mod(h, mm, w) == eval_mod(h, mback, w));
  }
  const char* text = R"({"outer_worlds": 1, "inner": {"worlds": ["x", "y"], "valuation": {"p": ["x"]}},
                         "mu": [{"world": 0, "agent": "A", "masses": {"x": "1/4", "y": "3/4"}}]})";
  SIModel m = si_model_from_json(text);
  CHECK(eval_prob(parse_prob("Pr_A(p)"), m, 0) == Rational(1, 4));
  const char* unnormalized = R"({"outer_worlds": 1, "inner": {"worlds": 1},
                                 "mu": [{"world": 0, "agent": "A", "masses": {"0": "1/2"}}]})";
  CHECK_THROWS(si_model_from_json(unnormalized));

  // repeated world names, as left by disjoint unions of named models
  SIModel dup = g.si_model(2, 2);
  dup.outer.names = {"w", "w"};
  dup.inner.names = {"x", "x"};
  SIModel dback = si_model_from_json(to_json(dup));
  Formula f = g.prob();
  for (int w = 0; w < 2; ++w) CHECK(eval_prob(f, dup, w) == eval_prob(f, dback, w));
}

TEST_CASE("append_disjoint keeps names distinct") {
  testgen::Gen g(12);
  EventModel a = g.event_model(2), b = g.event_model(3);
  int at = append_disjoint(a, b);
  CHECK(at == 2);
  CHECK(a.size() == 5);
  std::set<std::string> names(a.names.begin(), a.names.end());
  CHECK(names.size() == 5);
  a.validate();
  for (int k = 0; k < 10; ++k) {
    Event e = g.event();
    for (int i = 0; i < 3; ++i) CHECK(holds(e, a, at + i) == holds(e, b, i));
  }
}
