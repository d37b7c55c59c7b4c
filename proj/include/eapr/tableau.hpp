#pragma once

#include "eapr/constraints.hpp"
#include "eapr/semantics.hpp"
#include "eapr/syntax.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace eapr {

enum class Dir : std::uint8_t { LE, GE };

// w:f <= bound or w:f >= bound.
struct FConstraint {
  int w;
  Formula f;
  Dir dir;
  PolyTerm bound;
};

struct ActionTerm {
  int from;
  std::string action;
  int to;
};

// One tableau branch. Numeric constraints and every variable (atom values
// x_{w:p} and the fresh y's) live in `sys`; formulaic constraints on atoms
// and constants are turned into rows as soon as they are added.
struct Branch {
  int id = 0;
  IneqSystem sys;
  std::vector<FConstraint> fcs;
  std::vector<char> done;             // premise consumed
  std::vector<std::set<int>> sent;    // >= modal premises: states already served
  std::vector<std::map<std::string, int>> cls;  // state -> agent -> class id
  std::vector<int> origin;            // state -> index of the creating constraint, -1 for roots
  std::vector<ActionTerm> edges;
  std::vector<std::string> agents;    // agents that get class labels
  std::map<std::pair<int, Formula>, int> atom_vars;
  std::map<std::pair<int, Formula>, int> value_vars;
  std::vector<int> var_state;         // variable -> state whose rule introduced it  // y with w:f = y, shared by the product rules
  std::map<std::tuple<int, std::string, Formula>, int> box_witness;
  std::map<std::tuple<std::string, int, Formula>, int> k_witness;
  int next_class = 1;

  int num_states() const { return static_cast<int>(cls.size()); }
  int parent(int state) const;  // creating state, -1 for roots
  // New state; classes for agents not in `keep` are fresh.
  int add_state(const std::map<std::string, int>& keep = {}, int origin_fc = -1);
  bool same_class(const std::string& agent, int u, int v) const;
  int fresh_var(int owner = 0, const std::string& prefix = "y");
  int atom_var(int w, const Formula& atom);
  // Adds w:f dir bound; atoms, constants and ground modality-free formulas
  // become rows immediately. Exact duplicates are dropped.
  void add(int w, const Formula& f, Dir dir, const PolyTerm& bound);
  void add_eq(int w, const Formula& f, const PolyTerm& value);  // w:f = value
  // Term for the value of f at w: the atom variable, a constant, or one fresh
  // y per (w, f) pinned by add_eq on first use.
  PolyTerm value_of(int w, const Formula& f);

 private:
  std::set<std::tuple<int, Formula, int, std::map<Monomial, Rational>>> seen_;
};

std::string to_string(const FConstraint& c, const IneqSystem& s);

// Starting branches.
Branch validity_root(const Formula& f);      // {w0:f <= y, y < 1}
Branch satisfiability_root(const Formula& f);  // {w0:f >= 1}

struct TableauOptions {
  std::size_t max_steps = 2'000'000;  // rule applications over the whole search
  std::size_t poly_budget = 4000;
  bool eager = true;                  // feasibility check after branching and state creation
  bool trace = false;
};

// Applies one rule by priority: propositional non-branching, propositional
// branching, <=-modal state creation, >=-modal propagation. Returns the
// children (one or two); a saturated branch comes back unchanged.
std::vector<Branch> expand(const Branch& b, std::vector<std::string>* trace = nullptr);
bool saturated(const Branch& b);

using LeafCheck = std::function<FeasibilityResult(const Branch&)>;

struct SearchStats {
  std::size_t steps = 0, branches = 0, closed = 0, unknown = 0, max_states = 0;
};

struct SearchResult {
  Status status = Status::UNKNOWN;  // SAT: some complete branch open
  std::optional<Branch> open;       // the first open complete branch
  FeasibilityResult leaf;           // its solution
  SearchStats stats;
  std::vector<std::string> trace;
  std::string note;
};

// Depth-first search, left child first. The leaf check decides complete
// branches; the default is feasible(b.sys).
SearchResult search(const Branch& root, const TableauOptions& opts = {}, const LeafCheck& check = {});

// Model read off a branch and a solution of its system: worlds are the
// branch states, E_A from class labels, R_a from action terms.
struct Realization {
  EventModel frame;
  std::map<std::pair<int, Formula>, Rational> atoms;  // x_{w:atom}
};
Realization realize(const Branch& b, const std::vector<Rational>& solution);
// Var atoms become the valuation; unconstrained values are 0.
ModModel to_mod_model(const Realization& r, const std::set<std::string>& vars);

// Does `m` realise the branch under the state map `rl`? Atom values are
// pinned to the model, complex formulas to their model values, and the
// remaining variables are searched for. Relational terms must hold in m.
Status realizes(const Branch& b, const ModModel& m, const std::vector<int>& rl, std::size_t poly_budget = 2000);

enum class Verdict { Proved, Refuted, Unknown };
const char* verdict_name(Verdict v);

struct ProveResult {
  Verdict verdict = Verdict::Unknown;
  ModModel countermodel;  // when Refuted; the root is world 0
  SearchStats stats;
  std::vector<std::string> trace;
  std::string note;
};
ProveResult prove_valid(const Formula& f, const TableauOptions& opts = {});

struct SatResult {
  Status status = Status::UNKNOWN;
  ModModel model;  // when SAT; the root is world 0
  SearchStats stats;
  std::vector<std::string> trace;
  std::string note;
};
SatResult sat_mod(const Formula& f, const TableauOptions& opts = {});

}  // namespace eapr
