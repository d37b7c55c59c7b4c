#pragma once

#include "eapr/classical.hpp"
#include "eapr/tableau.hpp"

#include <map>
#include <string>
#include <vector>

namespace eapr {

// Probability coherence for one (state, agent): a mass u_X >= 0 per MCS X of
// the closure of the agent's atoms, sum u = 1, and x_{w:Pr_A(a)} equal to the
// mass of the MCSs containing a.
struct CoherenceSystem {
  int w = 0;
  std::string agent;
  std::vector<Event> atoms;
  std::vector<int> atom_vars;              // x_{w:Pr_A(a)} in the branch system
  std::vector<MCS> mcs;
  std::vector<int> mass_vars;              // u_X, one per MCS
  std::vector<std::vector<char>> member;   // member[X][a] = a in X
};

// Cache of MCS enumerations keyed by the atom list.
using MCSCache = std::map<std::vector<Event>, std::vector<MCS>>;

// Appends the mass variables and rows to `sys` (normally a copy of b.sys).
CoherenceSystem coherence_system(const Branch& b, int w, const std::string& agent, IneqSystem& sys,
                                 MCSCache* cache = nullptr);
// Every (state, agent) pair that carries Pr atoms on the branch.
std::vector<CoherenceSystem> coherence_systems(const Branch& b, IneqSystem& sys, MCSCache* cache = nullptr);

struct ProbOptions {
  TableauOptions tableau;
  bool pathlocal = false;
};

struct ProbSatResult {
  Status status = Status::UNKNOWN;
  SIModel model;   // when SAT; the formula has value 1 at outer world `world`
  int world = 0;
  SearchStats stats;
  std::vector<std::string> trace;
  std::string note;
};

// Outer frame from the branch, inner model the disjoint union of the MCS
// certificates carrying mass, measures from the mass variables.
SIModel assemble_si_model(const Branch& b, const std::vector<CoherenceSystem>& cs, const std::vector<Rational>& solution);

// Variables become Pr atoms of a private agent V_p over the event p: values
// of such atoms are independent across worlds, so satisfiability is unchanged.
Formula lift(const Formula& f);

// Satisfiability at value 1 over finitely branching frames. Global mode solves
// the whole branch system with every coherence system at once.
ProbSatResult sat_fb_global(const Formula& f, const ProbOptions& opts = {});
// Checks the constraints along each root-to-state path separately; a SAT
// answer is confirmed by one global solve of the same branch for the model.
ProbSatResult sat_fb_pathlocal(const Formula& f, const ProbOptions& opts = {});
ProbSatResult sat_fb(const Formula& f, const ProbOptions& opts = {});  // by opts.pathlocal

struct ProbProveResult {
  Verdict verdict = Verdict::Unknown;
  SIModel countermodel;  // when Refuted; value below 1 at world 0
  SearchStats stats;
  std::vector<std::string> trace;
  std::string note;
};
// Closed tableau from {w:f <= y, y < 1} with coherence at the leaves.
ProbProveResult prove_fb(const Formula& f, const ProbOptions& opts = {});

// Valid iff !D f is unsatisfiable.
Verdict valid_fb(const Formula& f, const ProbOptions& opts = {});
// gamma entails chi iff D g1 -> (D g2 -> ... -> chi) is valid.
Formula entailment_formula(const std::vector<Formula>& gamma, const Formula& chi);
Verdict entails_fb(const std::vector<Formula>& gamma, const Formula& chi, const ProbOptions& opts = {});
// Same verdicts; inputs without Pr atoms go to the modal tableau instead of
// being lifted, which is much cheaper on the Delta premises.
Verdict entails(const std::vector<Formula>& gamma, const Formula& chi, const ProbOptions& opts = {});

}  // namespace eapr
