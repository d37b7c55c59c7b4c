#include "eapr/semantics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <unordered_map>

namespace eapr {

// ---------------------------------------------------------------- EventModel

EventModel EventModel::with_worlds(int n) {
  EventModel m;
  for (int i = 0; i < n; ++i) m.add_world();
  return m;
}

int EventModel::add_world(std::string name) {
  int id = size();
  names.push_back(name.empty() ? "w" + std::to_string(id) : std::move(name));
  for (auto& [a, cls] : E) {
    int fresh = cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1;
    cls.push_back(fresh);
  }
  for (auto& [a, succ] : R) succ.emplace_back();
  for (auto& [p, ext] : V) ext.push_back(0);
  return id;
}

bool EventModel::same_class(const std::string& agent, int u, int v) const {
  auto it = E.find(agent);
  if (it == E.end()) return u == v;
  return it->second[static_cast<std::size_t>(u)] == it->second[static_cast<std::size_t>(v)];
}

std::vector<int> EventModel::eclass(const std::string& agent, int w) const {
  auto it = E.find(agent);
  if (it == E.end()) return {w};
  std::vector<int> out;
  int c = it->second[static_cast<std::size_t>(w)];
  for (int u = 0; u < size(); ++u)
    if (it->second[static_cast<std::size_t>(u)] == c) out.push_back(u);
  return out;
}

const std::vector<int>& EventModel::successors(const std::string& action, int w) const {
  static const std::vector<int> none;
  auto it = R.find(action);
  if (it == R.end()) return none;
  return it->second[static_cast<std::size_t>(w)];
}

bool EventModel::truth(const std::string& var, int w) const {
  auto it = V.find(var);
  return it != V.end() && it->second[static_cast<std::size_t>(w)];
}

void EventModel::set_truth(const std::string& var, int w, bool b) {
  auto& ext = V[var];
  ext.resize(static_cast<std::size_t>(size()), 0);
  ext[static_cast<std::size_t>(w)] = b;
}

void EventModel::add_edge(const std::string& action, int from, int to) {
  auto& succ = R[action];
  succ.resize(static_cast<std::size_t>(size()));
  auto& s = succ[static_cast<std::size_t>(from)];
  if (std::find(s.begin(), s.end(), to) == s.end()) s.push_back(to);
}

void EventModel::set_classes(const std::string& agent, const std::vector<std::vector<int>>& classes) {
  std::vector<int> cls(static_cast<std::size_t>(size()), -1);
  int id = 0;
  for (const auto& c : classes) {
    for (int w : c) {
      if (w < 0 || w >= size()) throw std::invalid_argument("class member out of range");
      if (cls[static_cast<std::size_t>(w)] != -1) throw std::invalid_argument("world in two classes of " + agent);
      cls[static_cast<std::size_t>(w)] = id;
    }
    ++id;
  }
  for (auto& c : cls)
    if (c == -1) c = id++;  // unlisted worlds are singletons
  E[agent] = std::move(cls);
}

void EventModel::validate() const {
  if (size() == 0) throw std::invalid_argument("model has no worlds");
  auto n = static_cast<std::size_t>(size());
  for (const auto& [a, cls] : E)
    if (cls.size() != n) throw std::invalid_argument("class vector size mismatch for agent " + a);
  for (const auto& [a, succ] : R) {
    if (succ.size() != n) throw std::invalid_argument("successor table size mismatch for action " + a);
    for (const auto& s : succ)
      for (int t : s)
        if (t < 0 || t >= size()) throw std::invalid_argument("edge target out of range for action " + a);
  }
  for (const auto& [p, ext] : V)
    if (ext.size() != n) throw std::invalid_argument("valuation size mismatch for " + p);
}

WorldSet denote(const Event& e, const EventModel& m) {
  auto n = static_cast<std::size_t>(m.size());
  WorldSet out(n, 0);
  switch (e.kind()) {
    case Event::Kind::Var: {
      auto it = m.V.find(e.name());
      if (it != m.V.end()) out = it->second;
      return out;
    }
    case Event::Kind::Not: {
      WorldSet a = denote(e.arg(), m);
      for (std::size_t i = 0; i < n; ++i) out[i] = !a[i];
      return out;
    }
    case Event::Kind::And: {
      WorldSet a = denote(e.arg(), m), b = denote(e.rhs(), m);
      for (std::size_t i = 0; i < n; ++i) out[i] = a[i] && b[i];
      return out;
    }
    case Event::Kind::Knows: {
      WorldSet a = denote(e.arg(), m);
      auto it = m.E.find(e.name());
      if (it == m.E.end()) return a;
      // a class is inside the denotation iff all of its members are
      std::map<int, bool> full;
      for (std::size_t i = 0; i < n; ++i) {
        auto [pos, fresh] = full.emplace(it->second[i], true);
        pos->second = pos->second && a[i];
      }
      for (std::size_t i = 0; i < n; ++i) out[i] = full[it->second[i]];
      return out;
    }
    case Event::Kind::Box: {
      WorldSet a = denote(e.arg(), m);
      for (int w = 0; w < m.size(); ++w) {
        bool ok = true;
        for (int u : m.successors(e.name(), w)) ok = ok && a[static_cast<std::size_t>(u)];
        out[static_cast<std::size_t>(w)] = ok;
      }
      return out;
    }
  }
  return out;
}

bool holds(const Event& e, const EventModel& m, int w) { return denote(e, m)[static_cast<std::size_t>(w)] != 0; }

// ---------------------------------------------------------------- values

namespace ops {
Rational neg(const Rational& a) { return 1 - a; }
Rational limp(const Rational& a, const Rational& b) {
  Rational r = 1 - a + b;
  return r > 1 ? Rational(1) : r;
}
Rational prod(const Rational& a, const Rational& b) { return a * b; }
Rational pimp(const Rational& a, const Rational& b) {
  if (a <= b) return 1;
  return b / a;
}
}  // namespace ops

namespace {

using AtomFn = std::function<std::vector<Rational>(const Formula&)>;

std::vector<Rational> eval_all(const Formula& f, const EventModel& frame, const AtomFn& atom) {
  auto n = static_cast<std::size_t>(frame.size());
  std::vector<Rational> out(n);
  switch (f.kind()) {
    case Formula::Kind::Var:
    case Formula::Kind::Pr: return atom(f);
    case Formula::Kind::Const:
      std::fill(out.begin(), out.end(), f.value());
      return out;
    case Formula::Kind::Neg: {
      auto a = eval_all(f.arg(), frame, atom);
      for (std::size_t i = 0; i < n; ++i) out[i] = ops::neg(a[i]);
      return out;
    }
    case Formula::Kind::Imp:
    case Formula::Kind::Prod:
    case Formula::Kind::PImp: {
      auto a = eval_all(f.arg(), frame, atom);
      auto b = eval_all(f.rhs(), frame, atom);
      for (std::size_t i = 0; i < n; ++i) {
        if (f.kind() == Formula::Kind::Imp) out[i] = ops::limp(a[i], b[i]);
        else if (f.kind() == Formula::Kind::Prod) out[i] = ops::prod(a[i], b[i]);
        else out[i] = ops::pimp(a[i], b[i]);
      }
      return out;
    }
    case Formula::Kind::Knows: {
      auto a = eval_all(f.arg(), frame, atom);
      auto it = frame.E.find(f.name());
      if (it == frame.E.end()) return a;
      std::map<int, Rational> lo;
      for (std::size_t i = 0; i < n; ++i) {
        auto [pos, fresh] = lo.emplace(it->second[i], a[i]);
        if (!fresh && a[i] < pos->second) pos->second = a[i];
      }
      for (std::size_t i = 0; i < n; ++i) out[i] = lo[it->second[i]];
      return out;
    }
    case Formula::Kind::Box: {
      auto a = eval_all(f.arg(), frame, atom);
      for (int w = 0; w < frame.size(); ++w) {
        Rational v = 1;
        for (int u : frame.successors(f.name(), w))
          if (a[static_cast<std::size_t>(u)] < v) v = a[static_cast<std::size_t>(u)];
        out[static_cast<std::size_t>(w)] = v;
      }
      return out;
    }
  }
  return out;
}

void check_unit(const std::vector<Rational>& v) {
  for (const auto& x : v)
    if (x < 0 || x > 1) throw std::logic_error("truth value outside [0,1]");
}

}  // namespace

Rational mass(const std::vector<Rational>& mu, const WorldSet& x) {
  Rational s = 0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (x[i] && sgn(mu[i]) != 0) s += mu[i];
  return s;
}

Rational ModModel::value(const std::string& var, int w) const {
  auto it = v.find(var);
  if (it == v.end()) return 0;
  return it->second[static_cast<std::size_t>(w)];
}

void ModModel::validate() const {
  frame.validate();
  for (const auto& [p, vals] : v) {
    if (vals.size() != static_cast<std::size_t>(frame.size())) throw std::invalid_argument("value vector size mismatch for " + p);
    check_unit(vals);
  }
}

std::vector<Rational> eval_mod_all(const Formula& f, const ModModel& m) {
  auto n = static_cast<std::size_t>(m.frame.size());
  auto out = eval_all(f, m.frame, [&](const Formula& a) {
    if (a.kind() == Formula::Kind::Pr) throw std::invalid_argument("Pr atom in a modal formula");
    auto it = m.v.find(a.name());
    if (it == m.v.end()) return std::vector<Rational>(n, Rational(0));
    return it->second;
  });
  check_unit(out);
  return out;
}

Rational eval_mod(const Formula& f, const ModModel& m, int w) { return eval_mod_all(f, m)[static_cast<std::size_t>(w)]; }

const std::vector<Rational>& SIModel::measure(int w, const std::string& agent) const {
  auto it = mu.find({w, agent});
  if (it == mu.end()) throw std::out_of_range("no measure for world " + std::to_string(w) + " and agent " + agent);
  return it->second;
}

void SIModel::validate() const {
  outer.validate();
  inner.validate();
  for (const auto& [key, masses] : mu) {
    if (key.first < 0 || key.first >= outer.size()) throw std::invalid_argument("measure for unknown outer world");
    if (masses.size() != static_cast<std::size_t>(inner.size()))
      throw std::invalid_argument("measure size mismatch at world " + std::to_string(key.first));
    Rational s = 0;
    for (const auto& q : masses) {
      if (q < 0) throw std::invalid_argument("negative mass");
      s += q;
    }
    if (s != 1) throw std::invalid_argument("masses do not sum to 1 at world " + std::to_string(key.first) + ", agent " + key.second);
  }
}

std::vector<Rational> eval_prob_all(const Formula& f, const SIModel& m) {
  auto n = static_cast<std::size_t>(m.outer.size());
  std::unordered_map<Formula, std::vector<Rational>, FormulaHash> seen;  // atoms repeat across rules
  auto out = eval_all(f, m.outer, [&](const Formula& a) {
    if (a.kind() == Formula::Kind::Var) throw std::invalid_argument("bare variable in a probabilistic formula");
    auto it = seen.find(a);
    if (it != seen.end()) return it->second;
    WorldSet x = denote(a.event(), m.inner);
    std::vector<Rational> vals(n);
    for (std::size_t w = 0; w < n; ++w) vals[w] = mass(m.measure(static_cast<int>(w), a.name()), x);
    seen.emplace(a, vals);
    return vals;
  });
  check_unit(out);
  return out;
}

Rational eval_prob(const Formula& f, const SIModel& m, int w) { return eval_prob_all(f, m)[static_cast<std::size_t>(w)]; }

Rational eval_standard(const Formula& f, const StandardModel& m, int w) {
  auto n = static_cast<std::size_t>(m.frame.size());
  auto out = eval_all(f, m.frame, [&](const Formula& a) {
    if (a.kind() == Formula::Kind::Var) throw std::invalid_argument("bare variable in a probabilistic formula");
    WorldSet x = denote(a.event(), m.frame);
    std::vector<Rational> vals(n);
    for (std::size_t u = 0; u < n; ++u) {
      auto it = m.mu.find({static_cast<int>(u), a.name()});
      if (it == m.mu.end()) throw std::out_of_range("no measure in standard model");
      vals[u] = mass(it->second, x);
    }
    return vals;
  });
  check_unit(out);
  return out[static_cast<std::size_t>(w)];
}

int inner_copy(const SIModel& m, int inner_world) { return m.outer.size() + inner_world; }

StandardModel si_to_standard(const SIModel& m) {
  StandardModel s;
  int no = m.outer.size(), ni = m.inner.size();
  s.frame = EventModel::with_worlds(no + ni);
  for (int w = 0; w < no; ++w) s.frame.names[static_cast<std::size_t>(w)] = m.outer.names[static_cast<std::size_t>(w)];
  for (int x = 0; x < ni; ++x) s.frame.names[static_cast<std::size_t>(no + x)] = "x:" + m.inner.names[static_cast<std::size_t>(x)];

  std::set<std::string> agents, actions;
  for (const auto& [a, c] : m.outer.E) agents.insert(a);
  for (const auto& [a, c] : m.inner.E) agents.insert(a);
  for (const auto& [k, v] : m.mu) agents.insert(k.second);
  for (const auto& [a, r] : m.outer.R) actions.insert(a);
  for (const auto& [a, r] : m.inner.R) actions.insert(a);

  for (const auto& a : agents) {
    std::vector<int> cls(static_cast<std::size_t>(no + ni));
    for (int w = 0; w < no; ++w) {
      auto it = m.outer.E.find(a);
      cls[static_cast<std::size_t>(w)] = it == m.outer.E.end() ? w : it->second[static_cast<std::size_t>(w)];
    }
    int offset = no + 1;
    for (int w = 0; w < no; ++w) offset = std::max(offset, cls[static_cast<std::size_t>(w)] + 1);
    for (int x = 0; x < ni; ++x) {
      auto it = m.inner.E.find(a);
      cls[static_cast<std::size_t>(no + x)] = offset + (it == m.inner.E.end() ? x : it->second[static_cast<std::size_t>(x)]);
    }
    s.frame.E[a] = std::move(cls);
  }
  for (const auto& a : actions) {
    for (int w = 0; w < no; ++w)
      for (int u : m.outer.successors(a, w)) s.frame.add_edge(a, w, u);
    for (int x = 0; x < ni; ++x)
      for (int y : m.inner.successors(a, x)) s.frame.add_edge(a, no + x, no + y);
    s.frame.R[a].resize(static_cast<std::size_t>(no + ni));
  }
  for (const auto& [p, ext] : m.inner.V)
    for (int x = 0; x < ni; ++x) s.frame.set_truth(p, no + x, ext[static_cast<std::size_t>(x)] != 0);

  for (const auto& a : agents) {
    for (int w = 0; w < no; ++w) {
      auto it = m.mu.find({w, a});
      if (it == m.mu.end()) continue;
      std::vector<Rational> masses(static_cast<std::size_t>(no + ni), Rational(0));
      for (int x = 0; x < ni; ++x) masses[static_cast<std::size_t>(no + x)] = it->second[static_cast<std::size_t>(x)];
      s.mu[{w, a}] = std::move(masses);
    }
    for (int x = 0; x < ni; ++x) {
      std::vector<Rational> point(static_cast<std::size_t>(no + ni), Rational(0));
      point[static_cast<std::size_t>(no + x)] = 1;
      s.mu[{no + x, a}] = std::move(point);
    }
  }
  return s;
}

std::pair<Rational, Rational> lower_upper(const std::vector<std::vector<Rational>>& measures, const WorldSet& x) {
  if (measures.empty()) throw std::invalid_argument("lower_upper needs at least one measure");
  Rational lo = mass(measures[0], x), hi = lo;
  for (std::size_t i = 1; i < measures.size(); ++i) {
    Rational v = mass(measures[i], x);
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return {lo, hi};
}

bool entails_on_model(const std::vector<Formula>& gamma, const Formula& chi, const SIModel& m, int w) {
  for (const auto& g : gamma)
    if (eval_prob(g, m, w) != 1) return true;
  return eval_prob(chi, m, w) == 1;
}

bool entails_on_model(const std::vector<Formula>& gamma, const Formula& chi, const ModModel& m, int w) {
  for (const auto& g : gamma)
    if (eval_mod(g, m, w) != 1) return true;
  return eval_mod(chi, m, w) == 1;
}

// Appends src as a disjoint copy; returns the index of src's world 0.
int append_disjoint(EventModel& dst, const EventModel& src) {
  int n0 = dst.size();
  for (const auto& [a, ids] : src.E)
    if (!dst.E.count(a)) {
      std::vector<int> own(static_cast<std::size_t>(n0));
      std::iota(own.begin(), own.end(), 0);
      dst.E[a] = std::move(own);
    }
  for (const auto& [a, succ] : src.R)
    if (!dst.R.count(a)) dst.R[a].assign(static_cast<std::size_t>(n0), {});
  for (const auto& [p, ext] : src.V)
    if (!dst.V.count(p)) dst.V[p].assign(static_cast<std::size_t>(n0), 0);
  std::map<std::string, int> base;
  for (const auto& [a, ids] : dst.E) base[a] = ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
  std::set<std::string> taken(dst.names.begin(), dst.names.end());
  for (int i = 0; i < src.size(); ++i) {
    std::string name = src.names[static_cast<std::size_t>(i)];
    if (taken.count(name)) name = "w" + std::to_string(dst.size());
    while (taken.count(name)) name += "'";
    taken.insert(name);
    dst.add_world(name);
  }
  for (const auto& [a, ids] : src.E)
    for (int i = 0; i < src.size(); ++i) dst.E[a][static_cast<std::size_t>(n0 + i)] = base[a] + ids[static_cast<std::size_t>(i)];
  for (const auto& [a, succ] : src.R)
    for (int i = 0; i < src.size(); ++i)
      for (int t : succ[static_cast<std::size_t>(i)]) dst.add_edge(a, n0 + i, n0 + t);
  for (const auto& [p, ext] : src.V)
    for (int i = 0; i < src.size(); ++i)
      if (ext[static_cast<std::size_t>(i)]) dst.set_truth(p, n0 + i, true);
  return n0;
}

}  // namespace eapr
