#include <random>

#include "doctest.h"
#include "eapr/constraints.hpp"

using namespace eapr;

namespace {

PolyTerm X(int i) { return PolyTerm::var(i); }
Rational q(long n, long d = 1) { return rat(n, d); }

IneqSystem vars(int n) {
  IneqSystem s;
  for (int i = 0; i < n; ++i) s.new_var();
  return s;
}

// Fourier-Motzkin elimination with strictness flags; exact and tiny-scale only.
struct FmRow {
  std::vector<Rational> a;
  Rational c;  // a.x + c (<|<=) 0
  bool strict;
};

bool fm_feasible(const IneqSystem& s) {
  int n = s.num_vars();
  std::vector<FmRow> rows;
  auto push = [&](const PolyTerm& p, bool strict) {
    FmRow r{std::vector<Rational>(static_cast<std::size_t>(n)), p.constant(), strict};
    for (int v = 0; v < n; ++v) r.a[static_cast<std::size_t>(v)] = p.coeff(v);
    rows.push_back(r);
  };
  for (const auto& row : s.rows) {
    PolyTerm p = row.normal();
    push(p, row.rel == Rel::LT);
    if (row.rel == Rel::EQ) push(-p, false);
  }
  for (int v = 0; v < n; ++v) {
    push(-X(v), false);
    push(X(v) - PolyTerm(1), false);
  }
  for (int v = 0; v < n; ++v) {
    std::vector<FmRow> pos, neg, out;
    for (auto& r : rows) {
      const Rational& a = r.a[static_cast<std::size_t>(v)];
      (a > 0 ? pos : a < 0 ? neg : out).push_back(r);
    }
    for (const auto& p : pos)
      for (const auto& m : neg) {
        Rational ap = p.a[static_cast<std::size_t>(v)], am = -m.a[static_cast<std::size_t>(v)];
        FmRow r{std::vector<Rational>(static_cast<std::size_t>(n)), am * p.c + ap * m.c, p.strict || m.strict};
        for (int k = 0; k < n; ++k) r.a[static_cast<std::size_t>(k)] = am * p.a[static_cast<std::size_t>(k)] + ap * m.a[static_cast<std::size_t>(k)];
        out.push_back(r);
      }
    rows = std::move(out);
  }
  for (const auto& r : rows)
    if (r.strict ? !(r.c < 0) : !(r.c <= 0)) return false;
  return true;
}

IneqSystem random_linear(std::mt19937& rng, int nv, int nrows) {
  IneqSystem s = vars(nv);
  std::uniform_int_distribution<int> coef(-3, 3), rel(0, 5), cst(-4, 4), den(1, 4);
  for (int i = 0; i < nrows; ++i) {
    PolyTerm p(q(cst(rng), den(rng)));
    for (int v = 0; v < nv; ++v) p += PolyTerm(coef(rng)) * X(v);
    int r = rel(rng);
    s.add(p, r < 3 ? Rel::LE : r < 5 ? Rel::LT : Rel::EQ, 0);
  }
  return s;
}

}  // namespace

TEST_CASE("linear_feasible: basic verdicts") {
  IneqSystem a = vars(1);
  a.le(X(0), q(1, 2));
  a.ge(X(0), q(3, 5));
  CHECK(linear_feasible(a).status == Status::UNSAT);

  IneqSystem b = vars(2);
  b.eq(X(0) + X(1), 1);
  b.ge(X(0), q(3, 10));
  auto rb = linear_feasible(b);
  REQUIRE(rb.status == Status::SAT);
  CHECK(rb.witness[0] + rb.witness[1] == 1);
  CHECK(rb.witness[0] >= q(3, 10));
  CHECK(substitute_check(b, rb.witness));

  IneqSystem c = vars(1);
  c.lt(X(0), 1);
  c.ge(X(0), 1);
  CHECK(linear_feasible(c).status == Status::UNSAT);

  IneqSystem d = vars(2);
  d.lt(X(0), X(1));
  d.lt(X(1), X(0) + q(1, 1000));
  auto rd = linear_feasible(d);
  REQUIRE(rd.status == Status::SAT);
  CHECK(rd.witness[0] < rd.witness[1]);

  IneqSystem nl = vars(1);
  nl.eq(X(0) * X(0), q(1, 4));
  CHECK_THROWS_AS(linear_feasible(nl), std::invalid_argument);
}

TEST_CASE("linear_feasible: constant rows and empty system") {
  IneqSystem e;
  auto r = linear_feasible(e);
  CHECK(r.status == Status::SAT);
  CHECK(substitute_check(e, {}));
  IneqSystem k;
  k.lt(PolyTerm(1), PolyTerm(1));
  CHECK(linear_feasible(k).status == Status::UNSAT);
}

TEST_CASE("poly_feasible: basic verdicts") {
  IneqSystem a = vars(2);
  a.ge(X(0) * X(1), q(1, 2));
  a.le(X(0), q(3, 5));
  a.le(X(1), q(3, 5));
  CHECK(poly_feasible(a).status == Status::UNSAT);

  IneqSystem b = vars(1);
  b.eq(X(0) * X(0), q(1, 4));
  auto rb = poly_feasible(b);
  REQUIRE(rb.status == Status::SAT);
  CHECK(rb.witness[0] == q(1, 2));
  CHECK(substitute_check(b, rb.witness));
  CHECK_FALSE(substitute_check(b, {q(1, 2) + q(1, 100)}));
  CHECK_THROWS(substitute_check(b, {}));

  IneqSystem c = vars(2);
  c.eq(X(0) * X(1), X(1));
  c.ge(X(1), q(1, 2));
  c.le(X(0), q(1, 2));
  CHECK(poly_feasible(c).status == Status::UNSAT);
  PolyOptions io;
  io.lp_relaxation = false;
  CHECK(poly_feasible(c, io).status == Status::UNSAT);

  // division normal form: y2 <= P*y1, y1 > 0
  IneqSystem d = vars(3);
  d.le(X(2), X(0) * X(1));
  d.gt(X(1), 0);
  d.eq(X(2), q(1, 3));
  auto rd = feasible(d);
  REQUIRE(rd.status == Status::SAT);
  CHECK(substitute_check(d, rd.witness));
}

TEST_CASE("poly_feasible: budget exhaustion is UNKNOWN") {
  // x*y = 1/3 with x = y has only an irrational solution
  IneqSystem s = vars(2);
  s.eq(X(0) * X(1), q(1, 3));
  s.eq(X(0), X(1));
  PolyOptions o;
  o.budget = 50;
  CHECK(poly_feasible(s, o).status == Status::UNKNOWN);
}

TEST_CASE("linear systems: simplex, Fourier-Motzkin and box search agree") {
  std::mt19937 rng(2024);
  int decisive = 0;
  for (int i = 0; i < 500; ++i) {
    IneqSystem s = random_linear(rng, 1 + i % 3, 1 + i % 4);
    auto lin = linear_feasible(s);
    REQUIRE(lin.status != Status::UNKNOWN);
    CHECK((lin.status == Status::SAT) == fm_feasible(s));
    if (lin.status == Status::SAT) CHECK(substitute_check(s, lin.witness));
    PolyOptions io;
    io.lp_relaxation = false;
    io.budget = 300;
    auto box = poly_feasible(s, io);
    if (box.status != Status::UNKNOWN) {
      ++decisive;
      CHECK(box.status == lin.status);
      if (box.status == Status::SAT) CHECK(substitute_check(s, box.witness));
    }
    CHECK(poly_feasible(s).status == lin.status);
  }
  CHECK(decisive > 250);
}

TEST_CASE("adding a row never turns UNSAT into SAT") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    IneqSystem s = random_linear(rng, 2, 3);
    IneqSystem t = s;
    IneqSystem extra = random_linear(rng, 2, 1);
    t.append(extra);
    if (linear_feasible(s).status == Status::UNSAT) CHECK(linear_feasible(t).status == Status::UNSAT);
    auto ps = poly_feasible(s), pt = poly_feasible(t);
    if (ps.status == Status::UNSAT) CHECK(pt.status != Status::SAT);
  }
}

TEST_CASE("random bilinear systems: SAT answers verify, UNSAT agrees with a grid search") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> coef(-2, 2), rel(0, 2), cst(-3, 3);
  for (int i = 0; i < 150; ++i) {
    IneqSystem s = vars(2);
    for (int r = 0; r < 2; ++r) {
      PolyTerm p = PolyTerm(q(cst(rng), 4)) + PolyTerm(coef(rng)) * X(0) + PolyTerm(coef(rng)) * X(1) +
                   PolyTerm(coef(rng)) * X(0) * X(1);
      s.add(p, rel(rng) == 0 ? Rel::LT : Rel::LE, 0);
    }
    auto r = poly_feasible(s);
    if (r.status == Status::SAT) CHECK(substitute_check(s, r.witness));
    if (r.status == Status::UNSAT) {
      for (int a = 0; a <= 8; ++a)
        for (int b = 0; b <= 8; ++b) CHECK_FALSE(substitute_check(s, {q(a, 8), q(b, 8)}));
    }
  }
}

TEST_CASE("smtlib dump") {
  IneqSystem s = vars(2);
  s.lt(X(0) * X(1), q(1, 2));
  std::string t = to_smtlib(s);
  CHECK(t.find("(set-logic QF_NRA)") != std::string::npos);
  CHECK(t.find("(declare-fun x1 () Real)") != std::string::npos);
  CHECK(t.find("(* 1.0 x0 x1)") != std::string::npos);
  CHECK(t.find("(check-sat)") != std::string::npos);
}
