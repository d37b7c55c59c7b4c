#include "doctest.h"
#include "eapr/classify.hpp"
#include "eapr/syntax.hpp"
#include "gen.hpp"

using namespace eapr;

TEST_CASE("parse: comparison of action outcomes") {
  Formula f = parse_prob("Pr_A([a]p) -> Pr_A([b]p)");
  Formula want = Formula::imp(Formula::pr("A", Event::box("a", Event::var("p"))),
                              Formula::pr("A", Event::box("b", Event::var("p"))));
  CHECK(f == want);
}

TEST_CASE("parse: half literal and constants") {
  CHECK(parse_prob("1/2") == Formula::half());
  CHECK(parse_prob("c(1/2)") == Formula::half());
  CHECK(parse_prob("c(2/4)") == Formula::half());
  CHECK(parse_mod("c(3/7)").value() == Rational(3, 7));
  CHECK_THROWS_AS(parse_mod("c(4/3)"), ParseError);
}

TEST_CASE("parse: unbalanced parenthesis reports offset") {
  try {
    parse_prob("Pr_A(p");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 7);
  }
}

TEST_CASE("parse: layer violations") {
  CHECK_THROWS_AS(parse_prob("p -> q"), ParseError);        // bare variable
  CHECK_THROWS_AS(parse_mod("Pr_A(p)"), ParseError);        // Pr in modal layer
  CHECK_THROWS_AS(parse_prob("Pr_A(p -> q)"), ParseError);  // fuzzy op inside event
  CHECK_THROWS_AS(parse_event("Pr_A(p)"), ParseError);
  CHECK_THROWS_AS(parse_mod("~p"), ParseError);
  CHECK_THROWS_AS(parse_mod("p & q"), ParseError);
  CHECK_NOTHROW(parse_event("K_A ~(p & [a]q)"));
}

TEST_CASE("parse: precedence and associativity") {
  Formula p = Formula::var("p"), q = Formula::var("q"), r = Formula::var("r");
  CHECK(parse_mod("p -> q -> r") == Formula::imp(p, Formula::imp(q, r)));
  CHECK(parse_mod("p + q * r") == Formula::oplus(p, Formula::prod(q, r)));
  CHECK(parse_mod("p (.) q + r") == Formula::oplus(Formula::odot(p, q), r));
  CHECK(parse_mod("p + q + r") == Formula::oplus(Formula::oplus(p, q), r));
  CHECK(parse_mod("!p => q") == Formula::pimp(Formula::neg(p), q));
  CHECK(parse_mod("D<a>p") == Formula::delta(Formula::diamond("a", p)));
  CHECK(parse_mod("Kd_A p") == Formula::kdiamond("A", p));
  CHECK(parse_mod("p <-> q") == Formula::biimp(p, q));
  CHECK(parse_mod("0") == Formula::zero());
  CHECK(parse_mod("1") == Formula::one());
}

TEST_CASE("desugar: defining formulas") {
  Formula p = Formula::var("p"), q = Formula::var("q");
  CHECK(desugar(Connective::Oplus, {p, q}) == Formula::imp(Formula::neg(p), q));
  CHECK(desugar(Connective::One, {}) == Formula::imp(Formula::half(), Formula::half()));
  CHECK(desugar(Connective::Zero, {}) == Formula::neg(Formula::one()));
  CHECK(desugar(Connective::Odot, {p, q}) == Formula::neg(Formula::imp(p, Formula::neg(q))));
  CHECK(desugar(Connective::Delta, {p}) == Formula::pimp(Formula::neg(p), Formula::zero()));
  CHECK(desugar(Connective::Diamond, {p}, "a") == Formula::neg(Formula::box("a", Formula::neg(p))));
  CHECK(desugar(Connective::KDiamond, {p}, "A") == Formula::neg(Formula::knows("A", Formula::neg(p))));
  CHECK(desugar(Connective::Rational, {}, {}, Rational(3, 4)) ==
        Formula::oplus(Formula::half(), Formula::prod(Formula::half(), Formula::half())));
  CHECK_THROWS_AS(desugar(Connective::Rational, {}, {}, Rational(1, 3)), std::invalid_argument);
  CHECK_THROWS_AS(desugar(Connective::Oplus, {p}), std::invalid_argument);
}

TEST_CASE("closure_neg") {
  CHECK(closure_neg(parse_event("p")).size() == 2);
  CHECK(closure_neg(parse_event("K_A p")).size() == 4);
  // subformulas [a](p&q), p&q, p, q and their negations
  CHECK(closure_neg(parse_event("[a](p & q)")).size() == 8);
}

TEST_CASE("size convention") {
  CHECK(size(parse_mod("p")) == 1);
  CHECK(size(parse_mod("!p")) == 2);
  CHECK(size(parse_prob("Pr_A([a]p)")) == 5);  // Pr, A, [], a, p
  CHECK(modal_depth(parse_mod("K_A [a]p -> [b]q")) == 2);
}

TEST_CASE("hash and equality are structural") {
  Formula a = parse_prob("Pr_A(K_B p) + [a]Pr_A(q)");
  Formula b = parse_prob("Pr_A(K_B p) + [a]Pr_A(q)");
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK(parse_mod("p") != parse_mod("q"));
  CHECK(parse_mod("c(1/3)") != parse_mod("c(2/3)"));
}

TEST_CASE("round trip on random formulas per layer") {
  testgen::GenOptions o;
  o.agents = {"A", "B"};
  o.actions = {"a", "b"};
  o.size = 12;
  o.product = true;
  o.modal_depth = 3;
  testgen::Gen g(7, o);
  for (int i = 0; i < 1000; ++i) {
    Formula f = g.mod();
    std::string s = to_string(f);
    INFO(s);
    REQUIRE(parse_mod(s) == f);
  }
  for (int i = 0; i < 1000; ++i) {
    Formula f = g.prob();
    std::string s = to_string(f);
    INFO(s);
    REQUIRE(parse_prob(s) == f);
  }
  for (int i = 0; i < 1000; ++i) {
    Event e = g.event(10, 3);
    std::string s = to_string(e);
    INFO(s);
    REQUIRE(parse_event(s) == e);
  }
}

TEST_CASE("classify: literals") {
  CHECK(classify(parse_prob("Pr_A(p)")).tag == FragmentTag::UPL_set_member);
  CHECK(classify(parse_prob("!Pr_A(p)")).tag == FragmentTag::UPL_set_member);
  CHECK(classify(parse_prob("[a]K_B Pr_A(<b>p)")).tag == FragmentTag::UPL_box);
  CHECK(classify(parse_prob("<a>Kd_B Pr_A([b]p)")).tag == FragmentTag::UPL_diamond);
  CHECK(classify(parse_prob("<a>!Pr_A(p)")).tag == FragmentTag::UPR_rule);
  CHECK(classify(parse_prob("[a]Pr_A(p) -> 0")).tag == FragmentTag::UPR_rule);
  CHECK(classify(parse_prob("[a]<b>Pr_A(p)")).tag == FragmentTag::none);   // mixed chain
  CHECK(classify(parse_prob("Pr_A(~p)")).tag == FragmentTag::none);        // negated inner literal
  CHECK(classify(parse_mod("[a][b]!p")).tag == FragmentTag::UML_box);
  CHECK(classify(parse_mod("<a>p")).tag == FragmentTag::UML_diamond);
  CHECK(classify(parse_prob("Pr_A(p)")).proper == false);
  CHECK(classify(parse_prob("K_A Pr_B(p)")).proper == true);
}

TEST_CASE("classify: rules") {
  CHECK(classify(parse_prob("Pr_A([a]p) -> Pr_A([b]p)")).tag == FragmentTag::UPR_rule);
  CHECK(classify(parse_prob("[a]Pr_ob(K_A p) -> Pr_ob(K_A p)")).tag == FragmentTag::UPR_rule);
  CHECK(classify(parse_prob("[a]!Pr_A(p) -> K_A Pr_B(q)")).tag == FragmentTag::UPR_rule);
  CHECK(classify(parse_prob("Pr_ob([a]p) -> [b]Pr_ob([a]p)")).tag == FragmentTag::none);
  CHECK(classify(parse_prob("<a>!Pr_A(p) -> Kd_A Pr_B(q)")).tag == FragmentTag::none);
  CHECK(classify(parse_prob("!Pr_A([a]p) (.) !Pr_B(K_A K_B q) -> 0")).tag == FragmentTag::UPR_rule);
  CHECK(classify(parse_prob("<a>Pr_A(p) (.) Kd_B Pr_A(q) -> <b>Pr_B(r)")).tag == FragmentTag::EPR_rule);
  CHECK(classify(parse_prob("<a>Pr_A(p) -> 0")).tag == FragmentTag::UPL_box);
}

TEST_CASE("classify is stable under clause form") {
  const char* pairs[][2] = {
      {"Pr_A([a]p) -> Pr_A([b]p)", "!Pr_A([a]p) + Pr_A([b]p)"},
      {"[a]Pr_A(p) (.) K_B Pr_A(q) -> [b]Pr_B(r)", "!([a]Pr_A(p)) + !(K_B Pr_A(q)) + [b]Pr_B(r)"},
      {"<a>Pr_A(p) (.) Pr_A(q) -> 0", "[a]!Pr_A(p) + !Pr_A(q)"},
      {"<a>Pr_A(p) -> <b>Pr_A(q)", "[a]!Pr_A(p) + <b>Pr_A(q)"},
  };
  for (auto& pr : pairs) {
    INFO(pr[0]);
    CHECK(classify(parse_prob(pr[0])).tag == classify(parse_prob(pr[1])).tag);
  }
}

TEST_CASE("classify_theory") {
  std::vector<Formula> half_rules{parse_prob("Pr_ob(q) -> !Pr_ob(q)"), parse_prob("!Pr_ob(q) -> Pr_ob(q)"),
                                  parse_prob("Pr_ob(q) -> Pr_ob(K_A p)")};
  CHECK(classify_theory(half_rules) == TheoryKind::UPR);
  // two diamonds in one clause is the rule [a]!Pr (.) [b]!Pr -> 0
  CHECK(classify_theory({parse_prob("<a>Pr_A(p) + <b>Pr_A(q)")}) == TheoryKind::UPR);
  std::vector<Formula> epr{parse_prob("<a>Pr_A(p) -> <b>Pr_A(q)"), parse_prob("<a>Pr_A(p)")};
  CHECK(classify_theory(epr) == TheoryKind::EPR);
  std::vector<Formula> bad{parse_prob("Pr_A(p) * Pr_A(q)")};
  CHECK(classify_theory(bad) == TheoryKind::Neither);
}
