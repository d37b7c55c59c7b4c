#include "eapr/fragments.hpp"

#include "eapr/classical.hpp"
#include "eapr/probsat.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace eapr {

namespace {

using Pair = std::pair<int, std::string>;

struct Item {
  int w;
  int lit;
  std::size_t depth;
  bool strict;  // value below 1 rather than equal to 1
};

// What the bottom Pr atoms demand of one (state, agent) measure.
struct Need {
  std::set<Event> forced;        // measure 1
  std::vector<Event> positive;   // measure > 0, one point each
};

struct Outer {
  std::vector<Literal> lits;
  std::vector<std::string> agents;  // outer K agents and Pr agents
  std::set<std::string> actions;
  std::vector<std::map<std::string, int>> cls;
  std::vector<std::tuple<int, std::string, int>> edges;
  std::vector<Item> items;
  std::set<std::tuple<int, int, std::size_t, bool>> seen;
  std::map<Pair, Need> needs;
  int next_class = 0;

  int add_state(const std::string& keep_agent = {}, int keep_class = -1) {
    std::map<std::string, int> c;
    for (const auto& a : agents) c[a] = a == keep_agent ? keep_class : next_class++;
    cls.push_back(std::move(c));
    return static_cast<int>(cls.size()) - 1;
  }

  bool add(int w, int lit, std::size_t depth, bool strict) {
    if (!seen.emplace(w, lit, depth, strict).second) return false;
    items.push_back({w, lit, depth, strict});
    return true;
  }

  std::vector<int> targets(int w, const Modality& m) const {
    std::vector<int> out;
    if (m.knows) {
      int k = cls[static_cast<std::size_t>(w)].at(m.label);
      for (int u = 0; u < static_cast<int>(cls.size()); ++u)
        if (cls[static_cast<std::size_t>(u)].at(m.label) == k) out.push_back(u);
    } else {
      for (const auto& [from, a, to] : edges)
        if (from == w && a == m.label) out.push_back(to);
    }
    return out;
  }
};

void collect_names(Outer& o) {
  std::set<std::string> agents;
  for (const auto& l : o.lits) {
    if (!l.prob) throw std::invalid_argument("variable literal " + to_string(l.to_formula()) + " in a probabilistic fragment");
    agents.insert(l.agent);
    for (const auto& m : l.prefix) (m.knows ? agents : o.actions).insert(m.label);
  }
  o.agents.assign(agents.begin(), agents.end());
}

// Box chains at 1 and diamond chains below 1 propagate; the others create.
void saturate(Outer& o) {
  std::vector<char> created;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < o.items.size(); ++i) {
      created.resize(o.items.size(), 0);
      Item it = o.items[i];
      const Literal& l = o.lits[static_cast<std::size_t>(it.lit)];
      if (it.depth == l.prefix.size()) continue;
      const Modality& m = l.prefix[it.depth];
      bool universal = (l.chain == Chain::Box) != it.strict;
      if (universal) {
        for (int u : o.targets(it.w, m))
          if (o.add(u, it.lit, it.depth + 1, it.strict)) changed = true;
      } else if (!created[i]) {
        created[i] = 1;
        int u;
        if (m.knows) {
          u = o.add_state(m.label, o.cls[static_cast<std::size_t>(it.w)].at(m.label));
        } else {
          u = o.add_state();
          o.edges.emplace_back(it.w, m.label, u);
        }
        o.add(u, it.lit, it.depth + 1, it.strict);
        changed = true;
      }
    }
  }
  for (const auto& it : o.items) {
    const Literal& l = o.lits[static_cast<std::size_t>(it.lit)];
    if (it.depth != l.prefix.size()) continue;
    Need& n = o.needs[{it.w, l.agent}];
    // Pr = 1: event; !Pr = 1: its negation; Pr < 1: negation has mass; !Pr < 1: event has mass
    bool event_side = it.strict == l.negated;
    Event e = event_side ? l.event : Event::neg(l.event);
    if (it.strict) n.positive.push_back(e);
    else n.forced.insert(e);
  }
}

Outer run(const std::vector<Literal>& theta, const std::vector<Literal>& targets = {}) {
  Outer o;
  o.lits = theta;
  o.lits.insert(o.lits.end(), targets.begin(), targets.end());
  collect_names(o);
  o.add_state();
  for (std::size_t i = 0; i < o.lits.size(); ++i) o.add(0, static_cast<int>(i), 0, i >= theta.size());
  saturate(o);
  return o;
}

struct Point {
  std::vector<Event> key;  // the satisfied set, for sharing certificates
  EventModel cert;
  Rational mass;
};
using Measures = std::map<Pair, std::vector<Point>>;

std::optional<Point> point_for(std::vector<Event> gamma) {
  std::sort(gamma.begin(), gamma.end());
  gamma.erase(std::unique(gamma.begin(), gamma.end()), gamma.end());
  EaResult r = ea_sat(gamma);
  if (!r.sat) return std::nullopt;
  return Point{std::move(gamma), std::move(r.model), 1};
}

std::optional<std::vector<Point>> measure_for(const Need& n) {
  std::vector<Event> base(n.forced.begin(), n.forced.end());
  std::vector<Point> pts;
  if (n.positive.empty()) {
    auto p = point_for(base);
    if (!p) return std::nullopt;
    pts.push_back(std::move(*p));
    return pts;
  }
  Rational share = rat(1, static_cast<long>(n.positive.size()));
  for (const auto& e : n.positive) {
    auto g = base;
    g.push_back(e);
    auto p = point_for(g);
    if (!p) return std::nullopt;
    p->mass = share;
    pts.push_back(std::move(*p));
  }
  return pts;
}

std::optional<Measures> measures_of(const Outer& o) {
  Measures ms;
  for (const auto& [key, n] : o.needs) {
    auto pts = measure_for(n);
    if (!pts) return std::nullopt;
    ms[key] = std::move(*pts);
  }
  return ms;
}

SIModel assemble(const Outer& o, const Measures& ms, std::set<std::string> pr_agents = {}) {
  SIModel m;
  int n = static_cast<int>(o.cls.size());
  m.outer = EventModel::with_worlds(n);
  for (const auto& a : o.agents) {
    std::map<int, int> renum;
    std::vector<int> ids;
    for (int w = 0; w < n; ++w) {
      int c = o.cls[static_cast<std::size_t>(w)].at(a);
      ids.push_back(renum.emplace(c, static_cast<int>(renum.size())).first->second);
    }
    m.outer.E[a] = std::move(ids);
  }
  for (const auto& a : o.actions) m.outer.R[a].assign(static_cast<std::size_t>(n), {});
  for (const auto& [from, a, to] : o.edges) m.outer.add_edge(a, from, to);

  std::map<std::vector<Event>, int> root_of;
  for (const auto& [key, pts] : ms)
    for (const auto& p : pts)
      if (!root_of.count(p.key)) root_of[p.key] = append_disjoint(m.inner, p.cert);
  if (m.inner.size() == 0) m.inner.add_world();
  auto size = static_cast<std::size_t>(m.inner.size());

  for (const auto& l : o.lits) pr_agents.insert(l.agent);
  for (int w = 0; w < n; ++w)
    for (const auto& a : pr_agents) {
      std::vector<Rational> mu(size);
      auto it = ms.find({w, a});
      if (it == ms.end()) {
        mu[0] = 1;
      } else {
        for (const auto& p : it->second) mu[static_cast<std::size_t>(root_of.at(p.key))] += p.mass;
      }
      m.mu[{w, a}] = std::move(mu);
    }
  m.validate();
  return m;
}

// Yes/no version of measures_of: every needed point set must be consistent.
using SatMemo = std::map<std::vector<Event>, bool>;

bool consistent(std::vector<Event> gamma, SatMemo& memo) {
  std::sort(gamma.begin(), gamma.end());
  gamma.erase(std::unique(gamma.begin(), gamma.end()), gamma.end());
  auto it = memo.find(gamma);
  if (it != memo.end()) return it->second;
  bool v = ea_sat(gamma).sat;
  memo.emplace(std::move(gamma), v);
  return v;
}

bool needs_met(const Outer& o, SatMemo& memo) {
  for (const auto& [key, n] : o.needs) {
    std::vector<Event> base(n.forced.begin(), n.forced.end());
    if (n.positive.empty() && !consistent(base, memo)) return false;
    for (const auto& e : n.positive) {
      auto g = base;
      g.push_back(e);
      if (!consistent(std::move(g), memo)) return false;
    }
  }
  return true;
}

bool entails_memo(const std::vector<Literal>& theta, const Literal& target, SatMemo& memo) {
  return !needs_met(run(theta, {target}), memo);
}

UplResult solve(const std::vector<Literal>& theta, const std::vector<Literal>& targets) {
  Outer o = run(theta, targets);
  UplResult r;
  r.states = o.cls.size();
  auto ms = measures_of(o);
  if (!ms) return r;
  r.sat = true;
  r.model = assemble(o, *ms);
  return r;
}

Formula oplus_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::zero();
  Formula out = fs.back();
  for (auto it = fs.rbegin() + 1; it != fs.rend(); ++it) out = Formula::oplus(*it, out);
  return out;
}

// Root measures for the clauses without a chosen literal: half on a point
// satisfying every clause event, half on one falsifying all of them.
std::optional<std::vector<Point>> half_half(const Need& base, const std::vector<Event>& events) {
  std::vector<Event> plus(base.forced.begin(), base.forced.end());
  std::vector<Event> minus = plus;
  for (const auto& e : events) {
    plus.push_back(e);
    minus.push_back(Event::neg(e));
  }
  auto p = point_for(plus);
  auto q = point_for(minus);
  if (!p || !q) return std::nullopt;
  p->mass = rat(1, 2);
  q->mass = rat(1, 2);
  std::vector<Point> out;
  out.push_back(std::move(*p));
  out.push_back(std::move(*q));
  return out;
}

// Joint LP over the MCSs of each agent's events: forced events get mass 1 and
// every propositional clause sums to at least 1.
std::optional<std::map<std::string, std::vector<Point>>> clause_lp(const Outer& o, const std::vector<const Clause*>& props) {
  std::map<std::string, std::set<Event>> events;
  for (const Clause* c : props)
    for (const auto& l : c->lits)
      if (!l.proper()) events[l.agent].insert(l.event);
  IneqSystem s;
  std::map<std::string, std::vector<MCS>> sets;
  std::map<std::string, std::vector<int>> vars;
  auto mass_of = [&](const std::string& a, const Event& e) {
    PolyTerm t;
    const auto& xs = sets[a];
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i].contains(e)) t += PolyTerm::var(vars[a][i]);
    return t;
  };
  for (const auto& [a, evs] : events) {
    std::set<Event> forced;
    if (auto it = o.needs.find({0, a}); it != o.needs.end()) forced = it->second.forced;
    std::set<Event> sf;
    for (const auto& e : evs)
      for (const auto& x : closure_neg(e)) sf.insert(x);
    for (const auto& e : forced)
      for (const auto& x : closure_neg(e)) sf.insert(x);
    sets[a] = mcs_enumerate(std::vector<Event>(sf.begin(), sf.end()));
    PolyTerm total;
    for (std::size_t i = 0; i < sets[a].size(); ++i) {
      int v = s.new_var("u[" + a + "," + std::to_string(i) + "]");
      vars[a].push_back(v);
      total += PolyTerm::var(v);
    }
    s.eq(total, 1);
    for (const auto& e : forced) s.eq(mass_of(a, e), 1);
  }
  for (const Clause* c : props) {
    PolyTerm sum;
    for (const auto& l : c->lits) {
      if (l.proper()) continue;  // counted as 0
      PolyTerm m = mass_of(l.agent, l.event);
      sum += l.negated ? PolyTerm(1) - m : m;
    }
    s.ge(sum, 1);
  }
  auto r = linear_feasible(s);
  if (r.status != Status::SAT) return std::nullopt;
  std::map<std::string, std::vector<Point>> out;
  for (const auto& [a, xs] : sets)
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Rational& u = r.witness[static_cast<std::size_t>(vars[a][i])];
      if (u != 0) out[a].push_back({xs[i].members, xs[i].cert, u});
    }
  return out;
}

bool chosen_sort(const Literal& l, TheoryKind k) {
  return l.proper() && l.chain == (k == TheoryKind::UPR ? Chain::Diamond : Chain::Box);
}

std::string show(const Literal& l) { return to_string(l.to_formula()); }

}  // namespace

FragmentTheory make_theory(const std::vector<Formula>& rules) {
  FragmentTheory t;
  t.kind = classify_theory(rules);
  if (t.kind == TheoryKind::Neither) throw std::invalid_argument("theory is neither UPR nor EPR+");
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (const auto& [a, e] : pr_atoms(rules[i])) t.agents.insert(a);
    if (auto lit = as_literal(rules[i])) {
      t.theta.push_back(*lit);
      continue;
    }
    Rule r = *as_rule(rules[i]);
    Clause c;
    c.origin = static_cast<int>(i);
    for (const auto& b : r.body) c.lits.push_back(b.negation());
    if (r.head) c.lits.push_back(*r.head);
    if (c.lits.size() == 1) t.theta.push_back(c.lits[0]);
    else t.xi.push_back(std::move(c));
  }
  return t;
}

Formula clause_formula(const Clause& c) {
  std::vector<Formula> fs;
  for (const auto& l : c.lits) fs.push_back(l.to_formula());
  return oplus_all(fs);
}

Formula theory_formula(const FragmentTheory& t) {
  std::vector<Formula> fs;
  for (const auto& l : t.theta) fs.push_back(l.to_formula());
  for (const auto& c : t.xi) fs.push_back(clause_formula(c));
  if (fs.empty()) return Formula::one();
  Formula out = fs.back();
  for (auto it = fs.rbegin() + 1; it != fs.rend(); ++it) out = Formula::odot(*it, out);
  return out;
}

UplResult upl_sat(const std::vector<Literal>& theta) { return solve(theta, {}); }

UplResult upl_refute(const std::vector<Literal>& theta, const Literal& target) { return solve(theta, {target}); }

bool upl_entails(const std::vector<Literal>& theta, const Literal& target) {
  SatMemo memo;
  return entails_memo(theta, target, memo);
}

namespace {

// spare: clauses that also have propositional literals are left to the root
// LP instead of getting a picked literal. The model is checked against `check`.
WitnessResult attempt(const FragmentTheory& t, bool spare, const FragmentTheory& check) {
  WitnessResult res;
  std::vector<Literal> lits = t.theta;
  std::vector<const Clause*> props;
  for (const auto& c : t.xi) {
    bool has_prop = std::any_of(c.lits.begin(), c.lits.end(), [](const Literal& l) { return !l.proper(); });
    auto it = std::find_if(c.lits.begin(), c.lits.end(), [&](const Literal& l) { return chosen_sort(l, t.kind); });
    if (it != c.lits.end() && !(spare && has_prop)) {
      lits.push_back(*it);
      continue;
    }
    if (!has_prop) {
      res.note = "clause " + to_string(clause_formula(c)) + " has no literal to pick";
      return res;
    }
    props.push_back(&c);
  }
  Outer o = run(lits);
  auto ms = measures_of(o);
  if (!ms) {
    res.note = "literal part with the picked literals is inconsistent";
    return res;
  }
  res.note = "picked " + std::to_string(lits.size() - t.theta.size()) + " literals";
  if (!props.empty()) {
    std::map<std::string, std::vector<Event>> events;
    for (const Clause* c : props)
      for (const auto& l : c->lits) events[l.agent].push_back(l.event);
    Measures halves;
    bool ok = !spare;
    for (const auto& [a, evs] : events) {
      if (!ok) break;
      auto it = o.needs.find({0, a});
      auto h = half_half(it == o.needs.end() ? Need{} : it->second, evs);
      if (!h) ok = false;
      else halves[{0, a}] = std::move(*h);
    }
    if (ok) {
      for (auto& [key, pts] : halves) (*ms)[key] = std::move(pts);
      res.note += ", half-half measure at the root";
    } else {
      auto lp = clause_lp(o, props);
      if (!lp) {
        res.note += ", no root measure for the propositional clauses";
        return res;
      }
      for (auto& [a, pts] : *lp) (*ms)[{0, a}] = std::move(pts);
      res.note += ", root measure from the clause LP";
    }
  }
  std::set<std::string> agents = t.agents;
  for (const auto& c : t.xi)
    for (const auto& l : c.lits) agents.insert(l.agent);
  res.model = assemble(o, *ms, agents);
  res.world = 0;
  res.ok = eval_prob(theory_formula(check), res.model, 0) == 1;
  if (!res.ok) res.note += ", assembled model fails the theory";
  return res;
}

WitnessResult witness_for(const FragmentTheory& t, const FragmentTheory& check) {
  WitnessResult first = attempt(t, false, check);
  if (first.ok) return first;
  // a picked box literal can reach the root through reflexive K chains and
  // clash with the propositional clauses there
  WitnessResult second = attempt(t, true, check);
  second.note = "first pick failed (" + first.note + "); " + second.note;
  return second;
}

}  // namespace

WitnessResult fragment_witness(const FragmentTheory& t) { return witness_for(t, t); }

FragmentResult reduce_and_solve(const FragmentTheory& t) {
  FragmentResult r;
  FragmentTheory cur = t;
  SatMemo points;
  auto step = [&](const std::string& action, int clause, const std::string& lit) {
    r.steps.push_back({action, clause, lit, cur});
  };
  while (true) {
    if (!needs_met(run(cur.theta), points)) {
      r.status = Status::UNSAT;
      step("contradiction", -1, "");
      r.reduced = cur;
      r.note = "literal part unsatisfiable";
      return r;
    }
    std::unordered_map<Formula, bool, FormulaHash> holds, refuted;
    auto entailed = [&](std::unordered_map<Formula, bool, FormulaHash>& memo, const Literal& l) {
      Formula key = l.to_formula();
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      ++r.entailment_checks;
      bool v = entails_memo(cur.theta, l, points);
      memo.emplace(key, v);
      return v;
    };
    bool grew = false;
    for (std::size_t ci = 0; ci < cur.xi.size() && !grew;) {
      Clause& c = cur.xi[ci];
      int origin = c.origin;
      auto sat = std::find_if(c.lits.begin(), c.lits.end(), [&](const Literal& l) { return entailed(holds, l); });
      if (sat != c.lits.end()) {
        std::string s = show(*sat);
        cur.xi.erase(cur.xi.begin() + static_cast<long>(ci));
        step("drop clause", origin, s);
        continue;
      }
      for (std::size_t k = 0; k < c.lits.size();) {
        if (entailed(refuted, c.lits[k].negation())) {
          std::string s = show(c.lits[k]);
          c.lits.erase(c.lits.begin() + static_cast<long>(k));
          step("drop literal", origin, s);
        } else {
          ++k;
        }
      }
      if (c.lits.empty()) {
        r.status = Status::UNSAT;
        step("contradiction", origin, "");
        r.reduced = cur;
        r.note = "every literal of a clause is refuted";
        return r;
      }
      if (c.lits.size() == 1) {
        Literal unit = c.lits[0];
        cur.theta.push_back(unit);
        cur.xi.erase(cur.xi.begin() + static_cast<long>(ci));
        step("unit", origin, show(unit));
        grew = true;
        continue;
      }
      ++ci;
    }
    if (!grew) break;
  }
  r.reduced = cur;
  // checked against the input theory, not the reduced one
  auto w = witness_for(cur, t);
  if (w.ok) {
    r.status = Status::SAT;
    r.model = std::move(w.model);
    r.world = w.world;
    r.note = "irreducible; " + w.note;
    return r;
  }
  auto g = sat_fb_global(theory_formula(t));
  r.status = g.status == Status::SAT ? Status::SAT : Status::UNKNOWN;
  r.model = std::move(g.model);
  r.world = g.world;
  r.note = "irreducible; witness construction failed (" + w.note + "), general solver says " + status_name(g.status);
  return r;
}

FragmentResult upr_sat(const std::vector<Formula>& rules) {
  if (classify_theory(rules) != TheoryKind::UPR) throw std::invalid_argument("not a UPR theory");
  return reduce_and_solve(make_theory(rules));
}

FragmentResult epr_sat(const std::vector<Formula>& rules) {
  FragmentTheory t = make_theory(rules);
  if (t.kind != TheoryKind::EPR) {
    // a theory in both fragments classifies as UPR; solve it as EPR+ anyway
    bool ok = std::all_of(rules.begin(), rules.end(), [](const Formula& f) {
      if (as_literal(f)) return true;
      auto r = as_rule(f);
      return r && is_epr_rule(*r);
    });
    if (!ok) throw std::invalid_argument("not an EPR+ theory");
    t.kind = TheoryKind::EPR;
  }
  return reduce_and_solve(t);
}

FragmentResult fragment_sat(const std::vector<Formula>& rules) { return reduce_and_solve(make_theory(rules)); }

ModModel classicalize(const ModModel& m, Threshold t) {
  ModModel out = m;
  for (auto& [p, vals] : out.v)
    for (auto& x : vals) x = (t == Threshold::Positive ? x > 0 : x == 1) ? 1 : 0;
  return out;
}

}  // namespace eapr
