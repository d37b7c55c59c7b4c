#include "eapr/tableau.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace eapr {

namespace {

using K = Formula::Kind;

bool modality_free(const Formula& f) {
  switch (f.kind()) {
    case K::Var:
    case K::Pr:
    case K::Const: return true;
    case K::Knows:
    case K::Box: return false;
    case K::Neg: return modality_free(f.arg());
    default: return modality_free(f.arg()) && modality_free(f.rhs());
  }
}

Rational ground_value(const Formula& f) {
  ModModel m;
  m.frame = EventModel::with_worlds(1);
  return eval_mod(f, m, 0);
}

void bound_row(IneqSystem& s, const PolyTerm& x, Dir d, const PolyTerm& p) {
  if (d == Dir::LE) s.le(x, p);
  else s.ge(x, p);
}

}  // namespace

int Branch::add_state(const std::map<std::string, int>& keep, int origin_fc) {
  std::map<std::string, int> c;
  for (const auto& a : agents) {
    auto it = keep.find(a);
    c[a] = it != keep.end() ? it->second : next_class++;
  }
  cls.push_back(std::move(c));
  origin.push_back(origin_fc);
  return num_states() - 1;
}

bool Branch::same_class(const std::string& agent, int u, int v) const {
  if (u == v) return true;
  const auto& cu = cls[static_cast<std::size_t>(u)];
  auto it = cu.find(agent);
  if (it == cu.end()) return false;
  return cls[static_cast<std::size_t>(v)].at(agent) == it->second;
}

int Branch::fresh_var(int owner, const std::string& prefix) {
  var_state.push_back(owner);
  return sys.new_var(prefix + std::to_string(sys.num_vars()));
}

int Branch::parent(int state) const {
  int o = origin[static_cast<std::size_t>(state)];
  return o < 0 ? -1 : fcs[static_cast<std::size_t>(o)].w;
}

int Branch::atom_var(int w, const Formula& atom) {
  auto key = std::make_pair(w, atom);
  auto it = atom_vars.find(key);
  if (it != atom_vars.end()) return it->second;
  var_state.push_back(w);
  int v = sys.new_var("x[w" + std::to_string(w) + ":" + to_string(atom) + "]");
  atom_vars.emplace(key, v);
  return v;
}

void Branch::add(int w, const Formula& f, Dir dir, const PolyTerm& bound) {
  if (!seen_.emplace(w, f, static_cast<int>(dir), bound.terms()).second) return;
  fcs.push_back({w, f, dir, bound});
  sent.emplace_back();
  if (f.is_atom()) {
    bound_row(sys, PolyTerm::var(atom_var(w, f)), dir, bound);
    done.push_back(1);
  } else if (f.kind() == K::Const) {
    bound_row(sys, PolyTerm(f.value()), dir, bound);
    done.push_back(1);
  } else if (is_ground(f) && modality_free(f)) {
    bound_row(sys, PolyTerm(ground_value(f)), dir, bound);
    done.push_back(1);
  } else {
    done.push_back(0);
  }
}

void Branch::add_eq(int w, const Formula& f, const PolyTerm& value) {
  add(w, f, Dir::GE, value);
  add(w, f, Dir::LE, value);
}

PolyTerm Branch::value_of(int w, const Formula& f) {
  if (f.is_atom()) return PolyTerm::var(atom_var(w, f));
  if (f.kind() == K::Const) return PolyTerm(f.value());
  if (is_ground(f) && modality_free(f)) return PolyTerm(ground_value(f));
  auto key = std::make_pair(w, f);
  auto it = value_vars.find(key);
  if (it != value_vars.end()) return PolyTerm::var(it->second);
  int y = fresh_var(w);
  value_vars.emplace(key, y);
  add_eq(w, f, PolyTerm::var(y));
  return PolyTerm::var(y);
}

std::string to_string(const FConstraint& c, const IneqSystem& s) {
  return "w" + std::to_string(c.w) + ": " + to_string(c.f) + (c.dir == Dir::LE ? " <= " : " >= ") + c.bound.str(s.names);
}

Branch validity_root(const Formula& f) {
  Branch b;
  auto ag = agents_of(f);
  b.agents.assign(ag.begin(), ag.end());
  b.add_state();
  int y = b.fresh_var();
  b.add(0, f, Dir::LE, PolyTerm::var(y));
  b.sys.lt(PolyTerm::var(y), 1);
  return b;
}

Branch satisfiability_root(const Formula& f) {
  Branch b;
  auto ag = agents_of(f);
  b.agents.assign(ag.begin(), ag.end());
  b.add_state();
  b.add(0, f, Dir::GE, 1);
  return b;
}

namespace {

enum Priority { kPlain = 0, kSplit = 1, kCreate = 2, kPropagate = 3, kNone = 4 };

std::vector<int> targets(const Branch& b, std::size_t i) {
  const FConstraint& c = b.fcs[i];
  std::vector<int> out;
  if (c.f.kind() == K::Knows) {
    for (int u = 0; u < b.num_states(); ++u)
      if (b.same_class(c.f.name(), c.w, u) && !b.sent[i].count(u)) out.push_back(u);
  } else {
    for (const auto& e : b.edges)
      if (e.from == c.w && e.action == c.f.name() && !b.sent[i].count(e.to)) out.push_back(e.to);
  }
  return out;
}

Priority priority(const Branch& b, std::size_t i) {
  const FConstraint& c = b.fcs[i];
  switch (c.f.kind()) {
    case K::Neg:
    case K::Prod: return b.done[i] ? kNone : kPlain;
    case K::Imp: return b.done[i] ? kNone : c.dir == Dir::GE ? kPlain : kSplit;
    case K::PImp: return b.done[i] ? kNone : kSplit;
    case K::Knows:
    case K::Box:
      if (c.dir == Dir::LE) return b.done[i] ? kNone : kCreate;
      return targets(b, i).empty() ? kNone : kPropagate;
    default: return kNone;
  }
}

std::pair<int, Priority> next_premise(const Branch& b) {
  int best = -1;
  Priority bp = kNone;
  for (std::size_t i = 0; i < b.fcs.size(); ++i) {
    Priority p = priority(b, i);
    if (p < bp) {
      bp = p;
      best = static_cast<int>(i);
      if (p == kPlain) break;
    }
  }
  return {best, bp};
}

const char* rule_name(const FConstraint& c) {
  bool le = c.dir == Dir::LE;
  switch (c.f.kind()) {
    case K::Neg: return le ? "neg<=" : "neg>=";
    case K::Imp: return le ? "imp<=" : "imp>=";
    case K::Prod: return "prod";
    case K::PImp: return le ? "pimp<=" : "pimp>=";
    case K::Knows: return le ? "K<=" : "K>=";
    case K::Box: return le ? "box<=" : "box>=";
    default: return "?";
  }
}

struct Mark {
  std::size_t fcs, rows, edges;
  int states;
};

Mark mark(const Branch& b) { return {b.fcs.size(), b.sys.rows.size(), b.edges.size(), b.num_states()}; }

std::string delta(const Branch& b, const Mark& m) {
  std::vector<std::string> parts;
  for (int s = m.states; s < b.num_states(); ++s) parts.push_back("new w" + std::to_string(s));
  for (std::size_t i = m.edges; i < b.edges.size(); ++i)
    parts.push_back("w" + std::to_string(b.edges[i].from) + " R_" + b.edges[i].action + " w" + std::to_string(b.edges[i].to));
  for (std::size_t i = m.fcs; i < b.fcs.size(); ++i) parts.push_back(to_string(b.fcs[i], b.sys));
  for (std::size_t i = m.rows; i < b.sys.rows.size(); ++i) {
    const auto& r = b.sys.rows[i];
    parts.push_back(r.lhs.str(b.sys.names) + " " + rel_name(r.rel) + " " + r.rhs.str(b.sys.names));
  }
  std::string out = "[";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "; " : "") + parts[i];
  return out + "]";
}

// Applies premise i. `left` is modified in place; `right` is set for
// branching rules.
void apply(Branch& left, std::optional<Branch>& right, std::size_t i) {
  const FConstraint c = left.fcs[i];
  const Formula& f = c.f;
  const PolyTerm& P = c.bound;
  int w = c.w;
  bool le = c.dir == Dir::LE;
  switch (f.kind()) {
    case K::Neg:
      left.done[i] = 1;
      left.add(w, f.arg(), le ? Dir::GE : Dir::LE, PolyTerm(1) - P);
      return;
    case K::Imp:
      left.done[i] = 1;
      if (le) {
        right = left;
        left.sys.ge(P, 1);
        int y = right->fresh_var(w);
        PolyTerm Y = PolyTerm::var(y);
        right->add(w, f.arg(), Dir::GE, PolyTerm(1) - P + Y);
        right->add(w, f.rhs(), Dir::LE, Y);
        right->sys.le(Y, P);
      } else {
        int y = left.fresh_var(w);
        PolyTerm Y = PolyTerm::var(y);
        left.add(w, f.arg(), Dir::LE, PolyTerm(1) - P + Y);
        left.add(w, f.rhs(), Dir::GE, Y);
      }
      return;
    case K::Prod: {
      left.done[i] = 1;
      PolyTerm y1 = left.value_of(w, f.arg()), y2 = left.value_of(w, f.rhs());
      bound_row(left.sys, y1 * y2, c.dir, P);
      return;
    }
    case K::PImp: {
      left.done[i] = 1;
      right = left;
      if (le) {
        left.sys.ge(P, 1);
        PolyTerm y1 = right->value_of(w, f.arg()), y2 = right->value_of(w, f.rhs());
        right->sys.le(y2, P * y1);
        right->sys.gt(y1, 0);
      } else {
        // value 1 when the antecedent is below the consequent
        PolyTerm y = PolyTerm::var(left.fresh_var(w));
        left.add(w, f.arg(), Dir::LE, y);
        left.add(w, f.rhs(), Dir::GE, y);
        PolyTerm y1 = right->value_of(w, f.arg()), y2 = right->value_of(w, f.rhs());
        right->sys.ge(y2, P * y1);
      }
      return;
    }
    case K::Knows:
      if (le) {
        left.done[i] = 1;
        const std::string& A = f.name();
        int k = left.cls[static_cast<std::size_t>(w)].at(A);
        auto key = std::make_tuple(A, k, f.arg());
        auto it = left.k_witness.find(key);
        int u = it != left.k_witness.end() ? it->second : -1;
        if (u < 0) {
          u = left.add_state({{A, k}}, static_cast<int>(i));
          left.k_witness.emplace(key, u);
        }
        left.add(u, f.arg(), Dir::LE, P);
      } else {
        for (int u : targets(left, i)) {
          left.sent[i].insert(u);
          left.add(u, f.arg(), Dir::GE, P);
        }
      }
      return;
    case K::Box:
      if (le) {
        left.done[i] = 1;
        auto key = std::make_tuple(w, f.name(), f.arg());
        auto it = left.box_witness.find(key);
        if (it != left.box_witness.end()) {
          left.add(it->second, f.arg(), Dir::LE, P);
          return;
        }
        // no successor at all is the other way to get value 1
        right = left;
        left.sys.ge(P, 1);
        int u = right->add_state({}, static_cast<int>(i));
        right->edges.push_back({w, f.name(), u});
        right->box_witness.emplace(key, u);
        right->add(u, f.arg(), Dir::LE, P);
      } else {
        for (int u : targets(left, i)) {
          left.sent[i].insert(u);
          left.add(u, f.arg(), Dir::GE, P);
        }
      }
      return;
    default: throw std::logic_error("no rule for " + to_string(f));
  }
}

}  // namespace

bool saturated(const Branch& b) { return next_premise(b).first < 0; }

std::vector<Branch> expand(const Branch& b, std::vector<std::string>* trace) {
  auto [i, p] = next_premise(b);
  if (i < 0) return {b};
  Branch left = b;
  std::optional<Branch> right;
  Mark m = mark(b);
  apply(left, right, static_cast<std::size_t>(i));
  if (trace) {
    std::string line = "(b" + std::to_string(b.id) + ", " + rule_name(b.fcs[static_cast<std::size_t>(i)]) + ", " +
                       to_string(b.fcs[static_cast<std::size_t>(i)], b.sys) + ", " + delta(left, m);
    if (right) line += " | " + delta(*right, m);
    trace->push_back(line + ")");
  }
  std::vector<Branch> out{std::move(left)};
  if (right) out.push_back(std::move(*right));
  return out;
}

SearchResult search(const Branch& root, const TableauOptions& opts, const LeafCheck& check) {
  SearchResult res;
  struct Item {
    Branch b;
    bool recheck;
  };
  std::vector<Item> stack;
  stack.push_back({root, false});
  int next_id = root.id + 1;
  bool budget_hit = false;
  std::string unknown_note;
  auto eager_closed = [&](const Branch& b) {
    if (!opts.eager) return false;
    FeasibilityResult r;
    if (b.sys.is_linear()) {
      r = linear_feasible(b.sys);
    } else {
      PolyOptions po;
      po.budget = 64;
      r = poly_feasible(b.sys, po);
    }
    return r.status == Status::UNSAT;
  };
  std::vector<std::string>* tr = opts.trace ? &res.trace : nullptr;

  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    Branch& b = item.b;
    ++res.stats.branches;
    if (item.recheck && eager_closed(b)) {
      ++res.stats.closed;
      if (tr) tr->push_back("(b" + std::to_string(b.id) + ", closed)");
      continue;
    }
    bool closed = false;
    while (true) {
      if (res.stats.steps >= opts.max_steps) {
        budget_hit = true;
        break;
      }
      auto [i, p] = next_premise(b);
      if (i < 0) break;
      ++res.stats.steps;
      std::optional<Branch> right;
      Mark m = mark(b);
      std::string premise = tr ? to_string(b.fcs[static_cast<std::size_t>(i)], b.sys) : "";
      const char* rule = rule_name(b.fcs[static_cast<std::size_t>(i)]);
      apply(b, right, static_cast<std::size_t>(i));
      if (right) right->id = next_id++;
      if (tr) {
        std::string line = "(b" + std::to_string(b.id) + ", " + rule + ", " + premise + ", " + delta(b, m);
        if (right) line += " | b" + std::to_string(right->id) + " " + delta(*right, m);
        tr->push_back(line + ")");
      }
      res.stats.max_states = std::max(res.stats.max_states, static_cast<std::size_t>(b.num_states()));
      if (right) stack.push_back({std::move(*right), true});
      if ((right || p == kCreate) && eager_closed(b)) {
        closed = true;
        break;
      }
    }
    if (budget_hit) break;
    if (closed) {
      ++res.stats.closed;
      if (tr) tr->push_back("(b" + std::to_string(b.id) + ", closed)");
      continue;
    }
    FeasibilityResult leaf = check ? check(b) : feasible(b.sys, opts.poly_budget);
    if (leaf.status == Status::SAT) {
      if (tr) tr->push_back("(b" + std::to_string(b.id) + ", open)");
      res.status = Status::SAT;
      res.note = "open complete branch b" + std::to_string(b.id);
      res.leaf = std::move(leaf);
      res.open = std::move(b);
      return res;
    }
    if (leaf.status == Status::UNKNOWN) {
      ++res.stats.unknown;
      unknown_note = leaf.note;
      if (tr) tr->push_back("(b" + std::to_string(b.id) + ", unknown)");
    } else {
      ++res.stats.closed;
      if (tr) tr->push_back("(b" + std::to_string(b.id) + ", closed)");
    }
  }
  if (budget_hit) {
    res.status = Status::UNKNOWN;
    res.note = "step budget of " + std::to_string(opts.max_steps) + " exhausted";
  } else if (res.stats.unknown > 0) {
    res.status = Status::UNKNOWN;
    res.note = std::to_string(res.stats.unknown) + " branch(es) undecided: " + unknown_note;
  } else {
    res.status = Status::UNSAT;
    res.note = "all " + std::to_string(res.stats.closed) + " branches closed";
  }
  return res;
}

Realization realize(const Branch& b, const std::vector<Rational>& solution) {
  Realization r;
  int n = b.num_states();
  r.frame = EventModel::with_worlds(n);
  for (int w = 0; w < n; ++w) r.frame.names[static_cast<std::size_t>(w)] = "w" + std::to_string(w);
  for (const auto& a : b.agents) {
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) ids[static_cast<std::size_t>(w)] = b.cls[static_cast<std::size_t>(w)].at(a);
    r.frame.E[a] = std::move(ids);
  }
  for (const auto& e : b.edges) r.frame.add_edge(e.action, e.from, e.to);
  for (const auto& [key, v] : b.atom_vars) r.atoms[key] = solution.at(static_cast<std::size_t>(v));
  return r;
}

ModModel to_mod_model(const Realization& r, const std::set<std::string>& vars) {
  ModModel m;
  m.frame = r.frame;
  for (const auto& p : vars) m.v[p].assign(static_cast<std::size_t>(r.frame.size()), Rational(0));
  for (const auto& [key, q] : r.atoms)
    if (key.second.kind() == K::Var) {
      auto& vals = m.v[key.second.name()];
      vals.resize(static_cast<std::size_t>(r.frame.size()));
      vals[static_cast<std::size_t>(key.first)] = q;
    }
  return m;
}

Status realizes(const Branch& b, const ModModel& m, const std::vector<int>& rl, std::size_t poly_budget) {
  if (rl.size() != static_cast<std::size_t>(b.num_states())) throw std::invalid_argument("state map size mismatch");
  for (const auto& e : b.edges) {
    const auto& succ = m.frame.successors(e.action, rl[static_cast<std::size_t>(e.from)]);
    if (std::find(succ.begin(), succ.end(), rl[static_cast<std::size_t>(e.to)]) == succ.end()) return Status::UNSAT;
  }
  for (int u = 0; u < b.num_states(); ++u)
    for (int v = u + 1; v < b.num_states(); ++v)
      for (const auto& a : b.agents)
        if (b.same_class(a, u, v) && !m.frame.same_class(a, rl[static_cast<std::size_t>(u)], rl[static_cast<std::size_t>(v)]))
          return Status::UNSAT;
  IneqSystem s = b.sys;
  for (const auto& [key, var] : b.atom_vars) {
    if (key.second.kind() != K::Var) throw std::invalid_argument("realizes expects modal atoms only");
    s.eq(PolyTerm::var(var), m.value(key.second.name(), rl[static_cast<std::size_t>(key.first)]));
  }
  for (const auto& c : b.fcs) {
    if (c.f.is_atom()) continue;
    Rational val = eval_mod(c.f, m, rl[static_cast<std::size_t>(c.w)]);
    bound_row(s, PolyTerm(val), c.dir, c.bound);
  }
  return feasible(s, poly_budget).status;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Proved: return "proved";
    case Verdict::Refuted: return "refuted";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

ProveResult prove_valid(const Formula& f, const TableauOptions& opts) {
  if (has_pr(f)) throw std::invalid_argument("prove_valid takes modal formulas; use the probabilistic solver");
  ProveResult out;
  SearchResult r = search(validity_root(f), opts);
  out.stats = r.stats;
  out.trace = std::move(r.trace);
  out.note = r.note;
  if (r.status == Status::UNSAT) {
    out.verdict = Verdict::Proved;
  } else if (r.status == Status::SAT) {
    out.verdict = Verdict::Refuted;
    out.countermodel = to_mod_model(realize(*r.open, r.leaf.witness), variables_of(f));
  }
  return out;
}

SatResult sat_mod(const Formula& f, const TableauOptions& opts) {
  if (has_pr(f)) throw std::invalid_argument("sat_mod takes modal formulas; use the probabilistic solver");
  SatResult out;
  SearchResult r = search(satisfiability_root(f), opts);
  out.status = r.status;
  out.stats = r.stats;
  out.trace = std::move(r.trace);
  out.note = r.note;
  if (r.status == Status::SAT) out.model = to_mod_model(realize(*r.open, r.leaf.witness), variables_of(f));
  return out;
}

}  // namespace eapr
