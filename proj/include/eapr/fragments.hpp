#pragma once

#include "eapr/classify.hpp"
#include "eapr/constraints.hpp"
#include "eapr/semantics.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace eapr {

// l_1 (+) ... (+) l_n; duplicates are kept since l (+) l is not l.
struct Clause {
  std::vector<Literal> lits;
  int origin = -1;  // index of the rule in the input theory
};

struct FragmentTheory {
  std::vector<Literal> theta;  // literals that must hold at 1
  std::vector<Clause> xi;
  TheoryKind kind = TheoryKind::Neither;
  std::set<std::string> agents;  // Pr agents of the input, kept through reduction
};

// Literals go to theta, rules become clauses of their negated bodies and head.
// Unit clauses are moved to theta. Throws std::invalid_argument unless the
// theory classifies as UPR or EPR+.
FragmentTheory make_theory(const std::vector<Formula>& rules);
Formula clause_formula(const Clause& c);
// The (.)-conjunction of every member; it has value 1 iff all members do.
Formula theory_formula(const FragmentTheory& t);

struct UplResult {
  bool sat = false;
  SIModel model;  // when sat; every literal at 1 (and the target below 1) at world 0
  std::size_t states = 0;
};

// One deterministic pass over the outer layer: boxes propagate, diamonds get
// one fresh successor each. Per (state, agent) the events forced to measure 1
// or 0 must be classically consistent; strict targets (measure > 0) are
// checked one at a time and mixed with equal weights.
UplResult upl_sat(const std::vector<Literal>& theta);
bool upl_entails(const std::vector<Literal>& theta, const Literal& target);
// Countermodel variant: sat means theta holds and target is below 1.
UplResult upl_refute(const std::vector<Literal>& theta, const Literal& target);

struct WitnessResult {
  bool ok = false;
  SIModel model;
  int world = 0;
  std::string note;  // which construction produced the measures at the root
};

// Model of an irreducible theory: theta plus one chosen proper literal per
// clause (a diamond literal for UPR, a box literal for EPR+), first in clause
// order. Clauses without proper literals are met at the root by the half-half
// measure; when no such pair of points exists an LP over the MCSs of the
// clause events is used instead.
WitnessResult fragment_witness(const FragmentTheory& t);

struct ReductionStep {
  std::string action;  // "drop clause", "drop literal", "unit", "contradiction"
  int clause = -1;
  std::string literal;
  FragmentTheory after;
};

struct FragmentResult {
  Status status = Status::UNKNOWN;
  SIModel model;  // when SAT, verified: every rule evaluates to 1 at `world`
  int world = 0;
  FragmentTheory reduced;
  std::vector<ReductionStep> steps;
  std::size_t entailment_checks = 0;
  std::string note;
};

FragmentResult upr_sat(const std::vector<Formula>& rules);
FragmentResult epr_sat(const std::vector<Formula>& rules);
// Dispatches on classify_theory.
FragmentResult fragment_sat(const std::vector<Formula>& rules);
// Reduction loop on an already built theory.
FragmentResult reduce_and_solve(const FragmentTheory& t);

enum class Threshold { Positive, One };
// Classical valuation on the same frame: 1 where v(p,w) > 0 (Positive) or
// v(p,w) = 1 (One), else 0.
ModModel classicalize(const ModModel& m, Threshold t);

}  // namespace eapr
