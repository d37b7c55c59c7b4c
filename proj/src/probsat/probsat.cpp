#include "eapr/probsat.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace eapr {

using K = Formula::Kind;

Formula lift(const Formula& f) {
  switch (f.kind()) {
    case K::Var: return Formula::pr("V_" + f.name(), Event::var(f.name()));
    case K::Pr:
    case K::Const: return f;
    case K::Neg: return Formula::neg(lift(f.arg()));
    case K::Imp: return Formula::imp(lift(f.arg()), lift(f.rhs()));
    case K::Prod: return Formula::prod(lift(f.arg()), lift(f.rhs()));
    case K::PImp: return Formula::pimp(lift(f.arg()), lift(f.rhs()));
    case K::Knows: return Formula::knows(f.name(), lift(f.arg()));
    case K::Box: return Formula::box(f.name(), lift(f.arg()));
  }
  return f;
}

namespace {

Formula prepare(const Formula& f) { return has_var(f) ? lift(f) : f; }

FeasibilityResult global_check(const Branch& b, std::size_t budget, MCSCache& cache) {
  IneqSystem s = b.sys;
  coherence_systems(b, s, &cache);
  return feasible(s, budget);
}

std::vector<int> path_of(const Branch& b, int s) {
  std::vector<int> out;
  for (int t = s; t >= 0; t = b.parent(t)) out.push_back(t);
  return out;
}

// Rows and coherence systems of the states on the path to each leaf state,
// one system per leaf.
FeasibilityResult pathlocal_check(const Branch& b, std::size_t budget, MCSCache& cache, std::size_t& paths) {
  int n = b.num_states();
  std::vector<char> inner(static_cast<std::size_t>(n), 0);
  for (int s = 0; s < n; ++s)
    if (b.parent(s) >= 0) inner[static_cast<std::size_t>(b.parent(s))] = 1;
  IneqSystem all = b.sys;
  auto cs = coherence_systems(b, all, &cache);
  int branch_vars = b.sys.num_vars();
  bool unknown = false;
  std::string note;
  for (int leaf = 0; leaf < n; ++leaf) {
    if (inner[static_cast<std::size_t>(leaf)]) continue;
    ++paths;
    auto path = path_of(b, leaf);
    std::set<int> on(path.begin(), path.end());
    auto owned = [&](int v) {
      if (v >= branch_vars) return true;  // mass variables, filtered below by system
      return on.count(b.var_state[static_cast<std::size_t>(v)]) > 0;
    };
    IneqSystem s;
    s.names = all.names;
    for (const auto& row : b.sys.rows) {
      auto vs = row.normal().vars();
      if (std::all_of(vs.begin(), vs.end(), owned)) s.rows.push_back(row);
    }
    // coherence rows were appended after the branch rows, grouped per system
    std::size_t at = b.sys.rows.size();
    for (const auto& c : cs) {
      std::size_t count = 1 + c.atoms.size();
      if (on.count(c.w))
        for (std::size_t k = 0; k < count; ++k) s.rows.push_back(all.rows[at + k]);
      at += count;
    }
    auto r = feasible(s, budget);
    if (r.status == Status::UNSAT) {
      r.note = "path to w" + std::to_string(leaf) + ": " + r.note;
      return r;
    }
    if (r.status == Status::UNKNOWN) {
      unknown = true;
      note = r.note;
    }
  }
  FeasibilityResult out;
  out.status = unknown ? Status::UNKNOWN : Status::SAT;
  out.note = unknown ? note : "all paths feasible";
  return out;
}

SIModel finish(const Branch& b, const std::vector<Rational>& witness, MCSCache& cache) {
  IneqSystem s = b.sys;
  auto cs = coherence_systems(b, s, &cache);
  return assemble_si_model(b, cs, witness);
}

}  // namespace

CoherenceSystem coherence_system(const Branch& b, int w, const std::string& agent, IneqSystem& sys, MCSCache* cache) {
  CoherenceSystem c;
  c.w = w;
  c.agent = agent;
  for (const auto& [key, var] : b.atom_vars)
    if (key.first == w && key.second.kind() == K::Pr && key.second.name() == agent) {
      c.atoms.push_back(key.second.event());
      c.atom_vars.push_back(var);
    }
  if (c.atoms.empty()) throw std::invalid_argument("no Pr_" + agent + " atoms at w" + std::to_string(w));
  auto it = cache ? cache->find(c.atoms) : MCSCache::iterator{};
  if (cache && it != cache->end()) {
    c.mcs = it->second;
  } else {
    std::set<Event> sf;
    for (const auto& a : c.atoms)
      for (const auto& e : closure_neg(a)) sf.insert(e);
    c.mcs = mcs_enumerate(std::vector<Event>(sf.begin(), sf.end()));
    if (cache) cache->emplace(c.atoms, c.mcs);
  }
  PolyTerm total;
  for (std::size_t i = 0; i < c.mcs.size(); ++i) {
    int u = sys.new_var("u[w" + std::to_string(w) + "," + agent + "," + std::to_string(i) + "]");
    c.mass_vars.push_back(u);
    total += PolyTerm::var(u);
    std::vector<char> row;
    for (const auto& a : c.atoms) row.push_back(c.mcs[i].contains(a));
    c.member.push_back(std::move(row));
  }
  sys.eq(total, 1);
  for (std::size_t k = 0; k < c.atoms.size(); ++k) {
    PolyTerm mass;
    for (std::size_t i = 0; i < c.mcs.size(); ++i)
      if (c.member[i][k]) mass += PolyTerm::var(c.mass_vars[i]);
    sys.eq(PolyTerm::var(c.atom_vars[k]), mass);
  }
  return c;
}

std::vector<CoherenceSystem> coherence_systems(const Branch& b, IneqSystem& sys, MCSCache* cache) {
  std::set<std::pair<int, std::string>> pairs;
  for (const auto& [key, var] : b.atom_vars)
    if (key.second.kind() == K::Pr) pairs.emplace(key.first, key.second.name());
  std::vector<CoherenceSystem> out;
  for (const auto& [w, a] : pairs) out.push_back(coherence_system(b, w, a, sys, cache));
  return out;
}

SIModel assemble_si_model(const Branch& b, const std::vector<CoherenceSystem>& cs, const std::vector<Rational>& solution) {
  SIModel m;
  m.outer = realize(b, solution).frame;
  std::map<std::vector<Event>, int> root_of;
  for (const auto& c : cs)
    for (std::size_t i = 0; i < c.mcs.size(); ++i) {
      if (solution.at(static_cast<std::size_t>(c.mass_vars[i])) == 0) continue;
      if (root_of.count(c.mcs[i].members)) continue;
      root_of[c.mcs[i].members] = append_disjoint(m.inner, c.mcs[i].cert);
    }
  if (m.inner.size() == 0) m.inner.add_world();
  auto n = static_cast<std::size_t>(m.inner.size());
  for (const auto& c : cs) {
    std::vector<Rational> mu(n);
    for (std::size_t i = 0; i < c.mcs.size(); ++i) {
      const Rational& u = solution.at(static_cast<std::size_t>(c.mass_vars[i]));
      if (u != 0) mu[static_cast<std::size_t>(root_of.at(c.mcs[i].members))] += u;
    }
    m.mu[{c.w, c.agent}] = std::move(mu);
  }
  for (int w = 0; w < m.outer.size(); ++w)
    for (const auto& a : b.agents)
      if (!m.mu.count({w, a})) {
        std::vector<Rational> point(n);
        point[0] = 1;
        m.mu[{w, a}] = std::move(point);
      }
  m.validate();
  return m;
}

ProbSatResult sat_fb_global(const Formula& f, const ProbOptions& opts) {
  Formula g = prepare(f);
  MCSCache cache;
  std::size_t budget = opts.tableau.poly_budget;
  SearchResult r = search(satisfiability_root(g), opts.tableau,
                          [&](const Branch& b) { return global_check(b, budget, cache); });
  ProbSatResult out;
  out.status = r.status;
  out.stats = r.stats;
  out.trace = std::move(r.trace);
  out.note = r.note;
  if (r.status == Status::SAT) {
    out.model = finish(*r.open, r.leaf.witness, cache);
    if (eval_prob(g, out.model, 0) != 1) throw std::logic_error("assembled model does not satisfy " + to_string(g));
  }
  return out;
}

ProbSatResult sat_fb_pathlocal(const Formula& f, const ProbOptions& opts) {
  Formula g = prepare(f);
  MCSCache cache;
  std::size_t budget = opts.tableau.poly_budget;
  std::size_t paths = 0, cross = 0;
  SearchResult r = search(satisfiability_root(g), opts.tableau, [&](const Branch& b) {
    auto local = pathlocal_check(b, budget, cache, paths);
    if (local.status != Status::SAT) return local;
    auto whole = global_check(b, budget, cache);
    if (whole.status == Status::UNSAT) {
      // paths agree separately but not jointly
      ++cross;
      whole.status = Status::UNKNOWN;
      whole.note = "path-local checks passed, joint system infeasible";
    }
    return whole;
  });
  ProbSatResult out;
  out.status = r.status;
  out.stats = r.stats;
  out.trace = std::move(r.trace);
  out.note = r.note + "; " + std::to_string(paths) + " path systems";
  if (cross) out.note += ", " + std::to_string(cross) + " cross-path disagreements";
  if (r.status == Status::SAT) {
    out.model = finish(*r.open, r.leaf.witness, cache);
    if (eval_prob(g, out.model, 0) != 1) throw std::logic_error("assembled model does not satisfy " + to_string(g));
  }
  return out;
}

ProbSatResult sat_fb(const Formula& f, const ProbOptions& opts) {
  return opts.pathlocal ? sat_fb_pathlocal(f, opts) : sat_fb_global(f, opts);
}

ProbProveResult prove_fb(const Formula& f, const ProbOptions& opts) {
  Formula g = prepare(f);
  MCSCache cache;
  std::size_t budget = opts.tableau.poly_budget;
  SearchResult r = search(validity_root(g), opts.tableau, [&](const Branch& b) { return global_check(b, budget, cache); });
  ProbProveResult out;
  out.stats = r.stats;
  out.trace = std::move(r.trace);
  out.note = r.note;
  if (r.status == Status::UNSAT) {
    out.verdict = Verdict::Proved;
  } else if (r.status == Status::SAT) {
    out.verdict = Verdict::Refuted;
    out.countermodel = finish(*r.open, r.leaf.witness, cache);
    if (eval_prob(g, out.countermodel, 0) >= 1) throw std::logic_error("countermodel does not refute " + to_string(g));
  }
  return out;
}

Verdict valid_fb(const Formula& f, const ProbOptions& opts) {
  auto r = sat_fb(Formula::neg(Formula::delta(f)), opts);
  if (r.status == Status::UNSAT) return Verdict::Proved;
  if (r.status == Status::SAT) return Verdict::Refuted;
  return Verdict::Unknown;
}

Formula entailment_formula(const std::vector<Formula>& gamma, const Formula& chi) {
  Formula out = chi;
  for (auto it = gamma.rbegin(); it != gamma.rend(); ++it) out = Formula::imp(Formula::delta(*it), out);
  return out;
}

Verdict entails_fb(const std::vector<Formula>& gamma, const Formula& chi, const ProbOptions& opts) {
  return valid_fb(entailment_formula(gamma, chi), opts);
}

Verdict entails(const std::vector<Formula>& gamma, const Formula& chi, const ProbOptions& opts) {
  Formula f = entailment_formula(gamma, chi);
  if (has_pr(f)) return valid_fb(f, opts);
  return prove_valid(f, opts.tableau).verdict;
}

}  // namespace eapr
