#include <algorithm>

#include "doctest.h"
#include "eapr/fragments.hpp"
#include "eapr/probsat.hpp"
#include "gen.hpp"

using namespace eapr;

namespace {

Formula P(const char* s) { return parse_prob(s); }
Literal L(const char* s) { return *as_literal(P(s)); }
std::vector<Formula> T(std::initializer_list<const char*> xs) {
  std::vector<Formula> out;
  for (const char* x : xs) out.push_back(P(x));
  return out;
}

bool all_one(const std::vector<Formula>& rules, const SIModel& m, int w) {
  return std::all_of(rules.begin(), rules.end(), [&](const Formula& f) { return eval_prob(f, m, w) == 1; });
}

Formula conj(const std::vector<Formula>& fs) {
  Formula out = fs.back();
  for (auto it = fs.rbegin() + 1; it != fs.rend(); ++it) out = Formula::odot(*it, out);
  return out;
}

testgen::GenOptions narrow() {
  testgen::GenOptions o;
  o.vars = {"p", "q"};
  o.agents = {"A"};
  o.actions = {"a"};
  o.modal_depth = 1;
  o.event_modal_depth = 1;
  return o;
}

testgen::GenOptions small() {
  testgen::GenOptions o;
  o.vars = {"p", "q"};
  o.agents = {"A", "B"};
  o.actions = {"a"};
  o.modal_depth = 1;
  o.event_modal_depth = 1;
  return o;
}

}  // namespace

TEST_CASE("theories in clause form") {
  auto t = make_theory(T({"Pr_A(p)", "[a]Pr_A(p) -> 0", "K_A Pr_B(q) (.) [a]!Pr_A(p) -> K_B Pr_A(q)"}));
  CHECK(t.kind == TheoryKind::UPR);
  REQUIRE(t.theta.size() == 2);
  CHECK(t.theta[1].to_formula() == P("<a>!Pr_A(p)"));
  REQUIRE(t.xi.size() == 1);
  CHECK(t.xi[0].lits.size() == 3);
  CHECK(t.xi[0].origin == 2);
  CHECK(t.xi[0].lits[0].to_formula() == P("Kd_A !Pr_B(q)"));
  CHECK_THROWS_AS(make_theory(T({"Pr_A(p) -> K_A Pr_A(p)"})), std::invalid_argument);
  CHECK(make_theory(T({"<a>Pr_A(p) -> <b>Pr_A(q)"})).kind == TheoryKind::EPR);
}

TEST_CASE("upl_sat examples") {
  CHECK_FALSE(upl_sat({L("Pr_A(p)"), L("!Pr_A(p)")}).sat);

  auto k = upl_sat({L("K_A Pr_B(p)")});
  REQUIRE(k.sat);
  CHECK(k.model.outer.size() == 1);
  CHECK(k.model.inner.size() == 1);
  CHECK(eval_prob(P("K_A Pr_B(p)"), k.model, 0) == 1);

  auto d = upl_sat({L("Pr_A(<a>p)"), L("!Pr_A(p)")});
  REQUIRE(d.sat);
  CHECK(eval_prob(P("Pr_A(<a>p) (.) !Pr_A(p)"), d.model, 0) == 1);
  CHECK(d.model.inner.size() == 2);

  CHECK_FALSE(upl_sat({L("[a]Pr_A(p)"), L("<a>!Pr_A(p)")}).sat);
  CHECK(upl_sat({L("[a]Pr_A(p)"), L("<b>!Pr_A(p)")}).sat);
  CHECK_FALSE(upl_sat({L("K_A Pr_B(K_A p)"), L("Kd_A !Pr_B(p)")}).sat);
  CHECK(upl_sat({}).sat);
}

TEST_CASE("upl_entails examples") {
  std::vector<Literal> th{L("Pr_A(p)"), L("[a]Pr_B(q)")};
  for (const auto& l : th) CHECK(upl_entails(th, l));
  CHECK(upl_entails({L("Pr_A(K_B p)")}, L("Pr_A(p)")));
  CHECK_FALSE(upl_entails({L("Pr_A(p)")}, L("Pr_A(q)")));
  CHECK(upl_entails({L("K_A Pr_B(p)")}, L("Pr_B(p)")));
  CHECK(upl_entails({L("Pr_A(p)")}, L("!!Pr_A(p)")));
  CHECK_FALSE(upl_entails({L("Pr_A(<a>p)")}, L("Pr_A(p)")));
  auto r = upl_refute({L("[a]Pr_A(p)")}, L("[a]Pr_A(K_A p)"));
  REQUIRE(r.sat);
  CHECK(eval_prob(P("[a]Pr_A(p)"), r.model, 0) == 1);
  CHECK(eval_prob(P("[a]Pr_A(K_A p)"), r.model, 0) < 1);
}

TEST_CASE("UPL sets agree with the general solver") {
  testgen::Gen g(7, small());
  int sat = 0, ent = 0;
  for (int i = 0; i < 60; ++i) {
    std::vector<Literal> th;
    int n = g.uniform(1, 3);
    for (int k = 0; k < n; ++k) th.push_back(g.random_upl());
    std::vector<Formula> fs;
    for (const auto& l : th) fs.push_back(l.to_formula());
    INFO(to_string(conj(fs)));
    auto r = upl_sat(th);
    auto gl = sat_fb_global(conj(fs));
    REQUIRE(gl.status != Status::UNKNOWN);
    CHECK(r.sat == (gl.status == Status::SAT));
    if (r.sat) {
      ++sat;
      CHECK(all_one(fs, r.model, 0));
    }
    if (i % 2) continue;  // the general entailment check is slow
    Literal target = g.random_upl();
    INFO("target " << to_string(target.to_formula()));
    bool e = upl_entails(th, target);
    Verdict v = entails_fb(fs, target.to_formula());
    REQUIRE(v != Verdict::Unknown);
    CHECK(e == (v == Verdict::Proved));
    if (e) ++ent;
  }
  CHECK(sat > 20);
  CHECK(ent > 1);
}

TEST_CASE("upr_sat examples") {
  auto half = T({"Pr_ob(q) -> !Pr_ob(q)", "!Pr_ob(q) -> Pr_ob(q)", "Pr_ob(q) -> Pr_ob(K_A p)"});
  CHECK(classify_theory(half) == TheoryKind::UPR);
  auto r = upr_sat(half);
  REQUIRE(r.status == Status::SAT);
  CHECK(all_one(half, r.model, r.world));
  CHECK(eval_prob(P("Pr_ob(q)"), r.model, r.world) == rat(1, 2));

  CHECK(upr_sat(T({"Pr_A(p)", "Pr_A(p) -> 0"})).status == Status::UNSAT);

  // the first rule refutes <a>!Pr_A(p), so the second needs Pr_A(q)
  auto chain = T({"[a]Pr_A(p)", "<a>!Pr_A(p) + Pr_A(q)", "Pr_A(q) -> 0"});
  CHECK(upr_sat(chain).status == Status::UNSAT);
  CHECK(sat_fb_global(conj(chain)).status == Status::UNSAT);
  auto chain2 = T({"[a]Pr_A(p)", "<a>!Pr_A(p) + Pr_A(q)"});
  auto c2 = upr_sat(chain2);
  REQUIRE(c2.status == Status::SAT);
  CHECK(all_one(chain2, c2.model, c2.world));
  CHECK(std::any_of(c2.steps.begin(), c2.steps.end(), [](const ReductionStep& s) { return s.action == "unit"; }));

  CHECK_THROWS_AS(upr_sat(T({"<a>Pr_A(p) -> <b>Pr_A(q)"})), std::invalid_argument);
}

TEST_CASE("epr_sat examples") {
  auto neg = T({"!Pr_A([a]p) (.) !Pr_B(K_A K_B q) -> 0"});
  auto r = epr_sat(neg);
  REQUIRE(r.status == Status::SAT);
  CHECK(all_one(neg, r.model, r.world));

  CHECK(epr_sat(T({"Pr_A(<a>p) -> 0", "Pr_A(<a>p)"})).status == Status::UNSAT);

  // two diamond literals make this a UPR clause; fragment_sat routes it there
  auto two = T({"<a>Pr_A(p) + <b>Pr_A(q)"});
  CHECK(classify_theory(two) == TheoryKind::UPR);
  CHECK_THROWS_AS(epr_sat(two), std::invalid_argument);
  auto t = fragment_sat(two);
  REQUIRE(t.status == Status::SAT);
  CHECK(all_one(two, t.model, t.world));

  auto rule = T({"<a>Pr_A(p) -> <b>Pr_A(q)", "<a>Pr_A(p)"});
  auto u = epr_sat(rule);
  REQUIRE(u.status == Status::SAT);
  CHECK(eval_prob(P("<b>Pr_A(q)"), u.model, u.world) == 1);
  CHECK(epr_sat(T({"<a>Pr_A(p) -> <b>Pr_A(q)", "<a>Pr_A(p)", "[b]!Pr_A(q)"})).status == Status::UNSAT);
}

TEST_CASE("fragment_witness constructions") {
  // all clauses propositional: every clause literal sits at 1/2
  auto t = make_theory(T({"Pr_A(p) + Pr_B(q)", "!Pr_A(p) + !Pr_B(q)", "Pr_A(K_A p) + Pr_A(K_A p)"}));
  auto w = fragment_witness(t);
  REQUIRE(w.ok);
  for (const auto& c : t.xi) {
    for (const auto& l : c.lits) CHECK(eval_prob(l.to_formula(), w.model, w.world) == rat(1, 2));
    CHECK(eval_prob(clause_formula(c), w.model, w.world) == 1);
  }
  CHECK(w.note.find("half-half") != std::string::npos);

  // one proper diamond literal: picked and pinned to 1
  auto s = make_theory(T({"<a>Pr_A(p) + !Pr_B(q)"}));
  auto v = fragment_witness(s);
  REQUIRE(v.ok);
  CHECK(eval_prob(P("<a>Pr_A(p)"), v.model, v.world) == 1);

  // the clause events cannot all hold together: the clause LP takes over
  auto lp = make_theory(T({"!Pr_A(<a>p)", "Pr_A(<a>q) + Pr_B(q)", "Pr_A([a]p) + Pr_B(p)"}));
  auto x = fragment_witness(lp);
  REQUIRE(x.ok);
  CHECK(x.note.find("LP") != std::string::npos);
}

TEST_CASE("witnesses of random irreducible theories") {
  for (int kind = 0; kind < 2; ++kind) {
    testgen::Gen g(100 + static_cast<std::uint64_t>(kind), small());
    int checked = 0;
    for (int i = 0; i < 200 && checked < 50; ++i) {
      std::vector<Formula> rules;
      int n = g.uniform(2, 4);
      for (int k = 0; k < n; ++k) rules.push_back(kind == 0 ? g.upr_rule() : g.epr_rule());
      if (classify_theory(rules) == TheoryKind::Neither) continue;
      auto r = fragment_sat(rules);
      if (r.status != Status::SAT) continue;
      INFO(to_string(theory_formula(r.reduced)));
      auto w = fragment_witness(r.reduced);
      CHECK(w.ok);
      if (w.ok) CHECK(eval_prob(theory_formula(r.reduced), w.model, w.world) == 1);
      ++checked;
    }
    CHECK(checked == 50);
  }
}

TEST_CASE("fragment solvers agree with sat_fb_global") {
  for (int kind = 0; kind < 2; ++kind) {
    testgen::Gen g(300 + static_cast<std::uint64_t>(kind), narrow());
    int sat = 0, unsat = 0;
    for (int i = 0; i < 60; ++i) {
      auto rules = g.fragment_theory(kind == 0, g.uniform(1, 3));
      Formula f = conj(rules);
      INFO(to_string(f));
      auto r = kind == 0 ? upr_sat(rules) : epr_sat(rules);
      auto gl = sat_fb_global(f);
      REQUIRE(gl.status != Status::UNKNOWN);
      CHECK(r.status == gl.status);
      if (r.status == Status::SAT) {
        ++sat;
        CHECK(all_one(rules, r.model, r.world));
      } else {
        ++unsat;
      }
    }
    CHECK(sat > 10);
    CHECK(unsat > 3);
  }
}

TEST_CASE("each reduction step keeps the verdict") {
  testgen::Gen g(77, narrow());
  int steps = 0;
  for (int i = 0; i < 40; ++i) {
    auto rules = g.fragment_theory(true, 3);
    auto r = upr_sat(rules);
    Status before = sat_fb_global(conj(rules)).status;
    for (const auto& s : r.steps) {
      if (s.action == "contradiction") continue;
      INFO(s.action << " " << s.literal);
      CHECK(sat_fb_global(theory_formula(s.after)).status == before);
      ++steps;
    }
  }
  CHECK(steps > 10);
}

TEST_CASE("classicalize keeps uniform literals") {
  testgen::GenOptions o = small();
  testgen::Gen g(5, o);
  auto uml = [&](Chain c, bool neg) {
    Literal l;
    int d = g.uniform(0, 2);
    l.chain = d ? c : Chain::None;
    for (int i = 0; i < d; ++i) {
      bool k = g.coin();
      l.prefix.push_back({k, k ? g.pick(o.agents) : g.pick(o.actions)});
    }
    l.prob = false;
    l.negated = neg;
    l.var = g.pick(o.vars);
    return l.to_formula();
  };
  int fired = 0;
  for (int i = 0; i < 1500; ++i) {
    ModModel m = g.mod_model(g.uniform(1, 3), 4);
    std::vector<Formula> lam;
    for (int k = 0; k < 2; ++k) lam.push_back(uml(g.coin() ? Chain::Box : Chain::Diamond, g.coin()));
    bool diamond = g.coin();
    bool neg = g.coin();
    Formula pi = uml(diamond ? Chain::Diamond : Chain::Box, neg);
    int w = 0;
    bool pre = eval_mod(pi, m, w) > 0 &&
               std::all_of(lam.begin(), lam.end(), [&](const Formula& f) { return eval_mod(f, m, w) == 1; });
    if (!pre) continue;
    ++fired;
    ModModel c = classicalize(m, neg ? Threshold::One : Threshold::Positive);
    for (const auto& [p, vals] : c.v)
      for (const auto& x : vals) CHECK((x == 0 || x == 1));
    INFO(to_string(pi));
    CHECK(eval_mod(pi, c, w) == 1);
    for (const auto& f : lam) CHECK(eval_mod(f, c, w) == 1);
  }
  CHECK(fired > 50);
}
