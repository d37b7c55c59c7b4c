#pragma once

#include "eapr/rational.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace eapr {

// A monomial is a sorted multiset of variable ids; the empty one is the constant.
using Monomial = std::vector<int>;

class PolyTerm {
 public:
  PolyTerm() = default;
  PolyTerm(const Rational& c);  // NOLINT: constants convert implicitly
  PolyTerm(int c) : PolyTerm(Rational(c)) {}  // NOLINT
  static PolyTerm var(int id);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  Rational constant() const;
  Rational coeff(int var) const;  // linear coefficient
  int degree() const;
  bool is_linear() const { return degree() <= 1; }
  bool is_constant() const { return degree() == 0; }
  std::vector<int> vars() const;

  Rational eval(const std::vector<Rational>& x) const;

  PolyTerm& operator+=(const PolyTerm& o);
  PolyTerm& operator-=(const PolyTerm& o);
  friend PolyTerm operator+(PolyTerm a, const PolyTerm& b) { return a += b; }
  friend PolyTerm operator-(PolyTerm a, const PolyTerm& b) { return a -= b; }
  friend PolyTerm operator*(const PolyTerm& a, const PolyTerm& b);
  friend PolyTerm operator-(const PolyTerm& a) { return PolyTerm(0) - a; }
  friend bool operator==(const PolyTerm& a, const PolyTerm& b) { return a.terms_ == b.terms_; }

  std::string str(const std::vector<std::string>& names = {}) const;

 private:
  std::map<Monomial, Rational> terms_;  // no zero coefficients
  void add(const Monomial& m, const Rational& c);
};

enum class Rel { LE, LT, EQ };
const char* rel_name(Rel r);

struct Ineq {
  PolyTerm lhs;
  Rel rel;
  PolyTerm rhs;
  PolyTerm normal() const { return lhs - rhs; }  // normal() rel 0
};

// Every variable carries the implicit bounds 0 <= x <= 1.
struct IneqSystem {
  std::vector<Ineq> rows;
  std::vector<std::string> names;

  int num_vars() const { return static_cast<int>(names.size()); }
  int new_var(std::string name = {});
  void add(PolyTerm lhs, Rel rel, PolyTerm rhs) { rows.push_back({std::move(lhs), rel, std::move(rhs)}); }
  void le(PolyTerm a, PolyTerm b) { add(std::move(a), Rel::LE, std::move(b)); }
  void lt(PolyTerm a, PolyTerm b) { add(std::move(a), Rel::LT, std::move(b)); }
  void ge(PolyTerm a, PolyTerm b) { add(std::move(b), Rel::LE, std::move(a)); }
  void gt(PolyTerm a, PolyTerm b) { add(std::move(b), Rel::LT, std::move(a)); }
  void eq(PolyTerm a, PolyTerm b) { add(std::move(a), Rel::EQ, std::move(b)); }
  void append(const IneqSystem& o);  // rows of o over the same variable ids
  bool is_linear() const;
  std::string str() const;
};

enum class Status { SAT, UNSAT, UNKNOWN };
const char* status_name(Status s);

struct FeasibilityResult {
  Status status = Status::UNKNOWN;
  std::vector<Rational> witness;  // one value per variable when SAT
  std::string note;               // which phase decided
};

// Exact general simplex over rationals with a symbolic infinitesimal for
// strict rows. Throws std::invalid_argument on nonlinear input.
FeasibilityResult linear_feasible(const IneqSystem& s);

struct PolyOptions {
  std::size_t budget = 4000;  // boxes processed before giving up
  // Also refute boxes with a McCormick LP relaxation and look for witnesses by
  // fixing a vertex cover of the product variables. Off means interval
  // reasoning and point sampling only.
  bool lp_relaxation = true;
};

// Branch and prune over boxes; UNSAT only when every box is refuted, SAT only
// with a verified witness, UNKNOWN once the budget is spent.
FeasibilityResult poly_feasible(const IneqSystem& s, const PolyOptions& opts = {});

// linear_feasible when linear, poly_feasible otherwise.
FeasibilityResult feasible(const IneqSystem& s, std::size_t budget = 4000);

// Exact evaluation of every row and every [0,1] bound. Throws when the
// witness has the wrong number of values.
bool substitute_check(const IneqSystem& s, const std::vector<Rational>& w);

// Replaces fixed variables by constants; ids are kept.
IneqSystem substitute(const IneqSystem& s, const std::map<int, Rational>& fixed);

std::string to_smtlib(const IneqSystem& s);

}  // namespace eapr
