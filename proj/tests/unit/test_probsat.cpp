#include <algorithm>

#include "doctest.h"
#include "eapr/probsat.hpp"
#include "gen.hpp"

using namespace eapr;

namespace {

Formula P(const char* s) { return parse_prob(s); }
Formula M(const char* s) { return parse_mod(s); }
Event E(const char* s) { return parse_event(s); }
Rational q(long n, long d = 1) { return rat(n, d); }

// Branch with w0:Pr_A(a_i) = v_i for each pair.
Branch pinned(const std::vector<std::pair<const char*, Rational>>& vals) {
  Branch b;
  b.agents = {"A"};
  b.add_state();
  for (const auto& [e, v] : vals) b.add_eq(0, Formula::pr("A", E(e)), PolyTerm(v));
  return b;
}

Status coherent(const Branch& b) {
  IneqSystem s = b.sys;
  coherence_systems(b, s);
  return feasible(s).status;
}

// Any inner model with up to three worlds and masses k/10 giving the values?
bool brute_coherent(const std::vector<std::pair<Event, Rational>>& want) {
  static const std::vector<std::vector<std::vector<int>>> parts{
      {{0}}, {{0, 0}, {0, 1}}, {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {0, 1, 2}}};
  for (int n = 1; n <= 3; ++n)
    for (const auto& part : parts[static_cast<std::size_t>(n - 1)])
      for (int val = 0; val < (1 << n); ++val)
        for (int k1 = 0; k1 <= 10; ++k1)
          for (int k2 = 0; k1 + k2 <= 10; ++k2) {
            int ks[3] = {k1, k2, 10 - k1 - k2};
            if (n == 1 && k1 != 10) continue;
            if (n == 2 && k1 + k2 != 10) continue;
            EventModel m = EventModel::with_worlds(n);
            m.E["A"] = part;
            m.V["p"].assign(static_cast<std::size_t>(n), 0);
            for (int w = 0; w < n; ++w) m.set_truth("p", w, (val >> w) & 1);
            std::vector<Rational> mu;
            for (int w = 0; w < n; ++w) mu.push_back(q(n == 1 ? 10 : ks[w], 10));
            bool ok = std::all_of(want.begin(), want.end(), [&](const auto& pr) { return mass(mu, denote(pr.first, m)) == pr.second; });
            if (ok) return true;
          }
  return false;
}

void check_coherence(const SIModel& m, const Formula& f) {
  for (const auto& [key, mu] : m.mu) {
    Rational total = 0;
    for (const auto& x : mu) {
      CHECK(x >= 0);
      total += x;
    }
    CHECK(total == 1);
  }
  for (const auto& [agent, ev] : pr_atoms(f))
    for (int w = 0; w < m.outer.size(); ++w) {
      Rational a = eval_prob(Formula::pr(agent, ev), m, w);
      Rational b = eval_prob(Formula::pr(agent, Event::neg(ev)), m, w);
      CHECK(a + b == 1);
    }
}

}  // namespace

TEST_CASE("coherence systems") {
  CHECK(coherent(pinned({{"p", q(1, 2)}})) == Status::SAT);

  auto bad = pinned({{"p", q(3, 10)}, {"K_A p", q(1, 2)}});
  CHECK(coherent(bad) == Status::UNSAT);
  CHECK_FALSE(brute_coherent({{E("p"), q(3, 10)}, {E("K_A p"), q(1, 2)}}));
  CHECK(coherent(pinned({{"p", q(1, 2)}, {"K_A p", q(3, 10)}})) == Status::SAT);
  CHECK(brute_coherent({{E("p"), q(1, 2)}, {E("K_A p"), q(3, 10)}}));

  CHECK(coherent(pinned({{"p", q(1, 3)}, {"~p", q(2, 3)}})) == Status::SAT);
  CHECK(coherent(pinned({{"p", q(1, 3)}, {"~p", q(1, 3)}})) == Status::UNSAT);

  auto b = pinned({{"p", q(1, 2)}, {"K_A p", q(1, 4)}});
  IneqSystem s = b.sys;
  auto cs = coherence_systems(b, s);
  REQUIRE(cs.size() == 1);
  const auto& c = cs[0];
  CHECK(c.atoms.size() == 2);
  CHECK(c.mcs.size() == 3);
  CHECK(c.mass_vars.size() == 3);
  for (std::size_t i = 0; i < c.mcs.size(); ++i)
    for (std::size_t k = 0; k < c.atoms.size(); ++k) CHECK(static_cast<bool>(c.member[i][k]) == c.mcs[i].contains(c.atoms[k]));
  CHECK(s.rows.size() == b.sys.rows.size() + 3);
}

TEST_CASE("sat_fb_global examples") {
  auto a = sat_fb_global(P("Pr_A([a]p)"));
  REQUIRE(a.status == Status::SAT);
  CHECK(eval_prob(P("Pr_A([a]p)"), a.model, a.world) == 1);
  check_coherence(a.model, P("Pr_A([a]p)"));

  CHECK(sat_fb_global(P("!D(Pr_A(p & q) -> Pr_A(p))")).status == Status::UNSAT);
  CHECK(sat_fb_global(P("Pr_A(p) (.) !Pr_A(p)")).status == Status::UNSAT);
  CHECK(sat_fb_global(P("Pr_A(p & ~p)")).status == Status::UNSAT);
  CHECK(sat_fb_global(P("K_A Pr_B(q) (.) !Pr_B(q)")).status == Status::UNSAT);

  auto half = sat_fb_global(P("Pr_A(p) <-> 1/2"));
  REQUIRE(half.status == Status::SAT);
  CHECK(eval_prob(P("Pr_A(p)"), half.model, 0) == q(1, 2));

  auto dual = sat_fb_global(P("Pr_A([a]p) -> Pr_A([b]p)"));
  CHECK(dual.status == Status::SAT);
}

TEST_CASE("the finitely branching validity") {
  Formula f = P("D<a>Pr_A(p) -> <a>DPr_A(p)");
  CHECK(prove_fb(f).verdict == Verdict::Proved);
  CHECK(sat_fb_global(Formula::neg(Formula::delta(f))).status == Status::UNSAT);
  CHECK(valid_fb(f) == Verdict::Proved);
}

TEST_CASE("validity and entailment") {
  CHECK(valid_fb(P("Pr_A(~p) <-> !Pr_A(p)")) == Verdict::Proved);
  CHECK(valid_fb(P("Pr_A(p) -> Pr_A(q)")) == Verdict::Refuted);
  CHECK(valid_fb(P("Pr_A(K_A p) -> Pr_A(p)")) == Verdict::Proved);
  Formula phi = P("Pr_A([a]p) -> K_B Pr_A(p)");
  CHECK(entails_fb({phi}, phi) == Verdict::Proved);
  CHECK(entails_fb({P("Pr_A(p & q)")}, P("Pr_A(p)")) == Verdict::Proved);
  CHECK(entails_fb({P("Pr_A(p)")}, P("Pr_A(p & q)")) == Verdict::Refuted);

  // pure modal formulas are lifted: the premises cannot both be 1
  CHECK(entails_fb({M("q"), M("!!!((p -> !p) -> !p)")}, Formula::zero()) == Verdict::Proved);
  CHECK(entails_fb({M("q")}, M("!!((p -> !p) -> !p)")) == Verdict::Refuted);
  CHECK(entails({M("q"), M("!!!((p -> !p) -> !p)")}, Formula::zero()) == Verdict::Proved);
  CHECK(entails({M("q")}, M("!!((p -> !p) -> !p)")) == Verdict::Refuted);

  auto pr = prove_fb(P("Pr_A(p) -> Pr_A(q)"));
  REQUIRE(pr.verdict == Verdict::Refuted);
  CHECK(eval_prob(P("Pr_A(p) -> Pr_A(q)"), pr.countermodel, 0) < 1);
}

TEST_CASE("path-local mode") {
  auto t = sat_fb_pathlocal(P("[a](Pr_A(p) -> Pr_A(p))"));
  CHECK(t.status == Status::SAT);
  CHECK(sat_fb_pathlocal(P("Pr_A(p) (.) !Pr_A(p)")).status == Status::UNSAT);
  // an unsatisfiable successor closes the first branch, the second survives
  auto alt = sat_fb_pathlocal(P("(<a>Pr_A(p & ~p)) + <a>Pr_A(p)"));
  REQUIRE(alt.status == Status::SAT);
  CHECK(eval_prob(P("(<a>Pr_A(p & ~p)) + <a>Pr_A(p)"), alt.model, 0) == 1);
}

TEST_CASE("global and path-local agree; SAT models verify") {
  testgen::GenOptions o;
  o.size = 6;
  o.agents = {"A", "B"};
  o.actions = {"a"};
  o.event_size = 2;
  testgen::Gen g(42, o);
  int sat = 0;
  for (int i = 0; i < 80; ++i) {
    Formula f = g.prob();
    INFO(to_string(f));
    auto gl = sat_fb_global(f);
    auto pl = sat_fb_pathlocal(f);
    REQUIRE(gl.status != Status::UNKNOWN);
    CHECK(pl.status == gl.status);
    if (gl.status == Status::SAT) {
      ++sat;
      CHECK(eval_prob(f, gl.model, gl.world) == 1);
      check_coherence(gl.model, f);
    }
  }
  CHECK(sat > 20);
}

TEST_CASE("adding an unreachable outer world keeps the value") {
  Formula f = P("K_A Pr_A(p) (.) [a]Pr_B(q)");
  auto r = sat_fb_global(f);
  REQUIRE(r.status == Status::SAT);
  SIModel m = r.model;
  int extra = m.outer.add_world();
  for (const std::string a : {"A", "B"}) {
    std::vector<Rational> mu(static_cast<std::size_t>(m.inner.size()));
    mu[0] = 1;
    m.mu[{extra, a}] = mu;
  }
  m.validate();
  CHECK(eval_prob(f, m, 0) == 1);
}

TEST_CASE("entails: modal route agrees with the lifted route") {
  testgen::GenOptions o;
  o.size = 4;
  o.modal_depth = 1;
  testgen::Gen g(19, o);
  int proved = 0;
  for (int i = 0; i < 40; ++i) {
    std::vector<Formula> gamma{g.mod()};
    Formula chi = g.mod();
    INFO(to_string(gamma[0]) << " |= " << to_string(chi));
    Verdict a = entails(gamma, chi);
    Verdict b = entails_fb(gamma, chi);
    REQUIRE(a != Verdict::Unknown);
    CHECK(a == b);
    proved += a == Verdict::Proved;
  }
  CHECK(proved > 3);
}
