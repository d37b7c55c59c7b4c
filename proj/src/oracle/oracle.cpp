#include "eapr/oracle.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace eapr {

const char* oracle_status_name(OracleStatus s) { return s == OracleStatus::SAT ? "SAT" : "NO_WITNESS_FOUND"; }

namespace {

using K = Formula::Kind;

struct Vocab {
  std::vector<std::string> k_agents;   // outer K
  std::vector<std::string> actions;    // outer [a]
  std::vector<std::string> pr_agents;
  std::vector<std::string> vars;       // outer variables
  std::vector<std::string> in_agents, in_actions, in_vars;
  std::map<std::string, std::vector<Event>> events;  // per Pr agent
};

void walk(const Formula& f, std::set<std::string>& ka, std::set<std::string>& ac, std::set<std::string>& vs,
          std::map<std::string, std::set<Event>>& ev) {
  switch (f.kind()) {
    case K::Var: vs.insert(f.name()); return;
    case K::Pr: ev[f.name()].insert(f.event()); return;
    case K::Const: return;
    case K::Neg: walk(f.arg(), ka, ac, vs, ev); return;
    case K::Imp:
    case K::Prod:
    case K::PImp:
      walk(f.arg(), ka, ac, vs, ev);
      walk(f.rhs(), ka, ac, vs, ev);
      return;
    case K::Knows: ka.insert(f.name()); walk(f.arg(), ka, ac, vs, ev); return;
    case K::Box: ac.insert(f.name()); walk(f.arg(), ka, ac, vs, ev); return;
  }
}

Vocab vocab(const Formula& f) {
  std::set<std::string> ka, ac, vs, ia, iac, iv;
  std::map<std::string, std::set<Event>> ev;
  walk(f, ka, ac, vs, ev);
  Vocab v;
  v.k_agents.assign(ka.begin(), ka.end());
  v.actions.assign(ac.begin(), ac.end());
  v.vars.assign(vs.begin(), vs.end());
  for (const auto& [a, es] : ev) {
    v.pr_agents.push_back(a);
    v.events[a].assign(es.begin(), es.end());
    for (const auto& e : es) {
      for (const auto& x : agents_of(e)) ia.insert(x);
      for (const auto& x : actions_of(e)) iac.insert(x);
      for (const auto& x : variables_of(e)) iv.insert(x);
    }
  }
  v.in_agents.assign(ia.begin(), ia.end());
  v.in_actions.assign(iac.begin(), iac.end());
  v.in_vars.assign(iv.begin(), iv.end());
  return v;
}

void check(const OracleBounds& b) {
  if (b.outer < 1 || b.inner < 1 || b.grid < 1) throw std::invalid_argument("oracle bounds must be positive");
}

// Restricted growth strings: every partition of n worlds once.
std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int i, int top) -> void {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (int c = 0; c <= top + 1; ++c) {
      cur[static_cast<std::size_t>(i)] = c;
      self(self, i + 1, std::max(top, c));
    }
  };
  if (n > 0) {
    cur[0] = 0;
    rec(rec, 1, 0);
  }
  return out;
}

std::vector<std::vector<int>> relation(int n, unsigned long mask) {
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (mask >> (i * n + j) & 1UL) succ[static_cast<std::size_t>(i)].push_back(j);
  return succ;
}

// Compositions of g into n ordered parts, as masses k/g.
std::vector<std::vector<Rational>> compositions(int n, int g) {
  std::vector<std::vector<Rational>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == n - 1) {
      cur[static_cast<std::size_t>(i)] = left;
      std::vector<Rational> mu;
      for (int c : cur) mu.push_back(rat(c, g));
      out.push_back(std::move(mu));
      return;
    }
    for (int c = 0; c <= left; ++c) {
      cur[static_cast<std::size_t>(i)] = c;
      self(self, i + 1, left - c);
    }
  };
  rec(rec, 0, g);
  return out;
}

// Odometer over a list of radices; fn gets the digit vector.
template <class Fn>
bool odometer(const std::vector<std::size_t>& radix, Fn&& fn) {
  std::vector<std::size_t> d(radix.size(), 0);
  for (auto r : radix)
    if (r == 0) return true;
  while (true) {
    if (!fn(d)) return false;
    std::size_t i = 0;
    while (i < d.size() && ++d[i] == radix[i]) d[i++] = 0;
    if (i == d.size()) return true;
  }
}

// Every frame with n worlds over the given agents and actions.
template <class Fn>
bool for_each_frame(int n, const std::vector<std::string>& agents, const std::vector<std::string>& actions, Fn&& fn) {
  auto parts = partitions(n);
  std::vector<std::size_t> radix;
  for (std::size_t i = 0; i < agents.size(); ++i) radix.push_back(parts.size());
  for (std::size_t i = 0; i < actions.size(); ++i) radix.push_back(std::size_t{1} << (n * n));
  return odometer(radix, [&](const std::vector<std::size_t>& d) {
    EventModel m = EventModel::with_worlds(n);
    for (std::size_t i = 0; i < agents.size(); ++i) m.E[agents[i]] = parts[d[i]];
    for (std::size_t i = 0; i < actions.size(); ++i) m.R[actions[i]] = relation(n, d[agents.size() + i]);
    return fn(m);
  });
}

template <class Fn>
bool for_each_event_model(int n, const Vocab& v, Fn&& fn) {
  return for_each_frame(n, v.in_agents, v.in_actions, [&](const EventModel& frame) {
    std::size_t bits = v.in_vars.size() * static_cast<std::size_t>(n);
    for (unsigned long mask = 0; mask < (1UL << bits); ++mask) {
      EventModel m = frame;
      for (std::size_t i = 0; i < v.in_vars.size(); ++i) {
        m.V[v.in_vars[i]].assign(static_cast<std::size_t>(n), 0);
        for (int w = 0; w < n; ++w)
          if (mask >> (i * static_cast<std::size_t>(n) + static_cast<std::size_t>(w)) & 1UL) m.set_truth(v.in_vars[i], w, true);
      }
      if (!fn(m)) return false;
    }
    return true;
  });
}

}  // namespace

OracleProbResult oracle_sat_prob(const Formula& f, const OracleBounds& b) {
  check(b);
  Vocab v = vocab(f);
  if (!v.vars.empty()) throw std::invalid_argument("oracle_sat_prob: variable outside Pr");
  OracleProbResult res;
  for (int n = 1; n <= b.inner; ++n) {
    auto comps = compositions(n, b.grid);
    std::set<std::vector<WorldSet>> seen;
    bool stop = !for_each_event_model(n, v, [&](const EventModel& inner) {
      std::vector<WorldSet> sig;
      for (const auto& a : v.pr_agents)
        for (const auto& e : v.events.at(a)) sig.push_back(denote(e, inner));
      if (!seen.insert(sig).second) return true;
      // one representative measure per tuple of Pr values, per agent
      std::vector<std::vector<const std::vector<Rational>*>> reps;
      for (const auto& a : v.pr_agents) {
        std::map<std::vector<Rational>, const std::vector<Rational>*> by_values;
        std::vector<WorldSet> ds;
        for (const auto& e : v.events.at(a)) ds.push_back(denote(e, inner));
        for (const auto& mu : comps) {
          std::vector<Rational> vals;
          for (const auto& d : ds) vals.push_back(mass(mu, d));
          by_values.emplace(std::move(vals), &mu);
        }
        std::vector<const std::vector<Rational>*> r;
        for (const auto& [vals, mu] : by_values) r.push_back(mu);
        reps.push_back(std::move(r));
      }
      for (int k = 1; k <= b.outer; ++k) {
        bool go = for_each_frame(k, v.k_agents, v.actions, [&](const EventModel& outer) {
          std::vector<std::size_t> radix;
          for (int w = 0; w < k; ++w)
            for (const auto& r : reps) radix.push_back(r.size());
          return odometer(radix, [&](const std::vector<std::size_t>& d) {
            SIModel m;
            m.outer = outer;
            m.inner = inner;
            std::size_t i = 0;
            for (int w = 0; w < k; ++w)
              for (std::size_t a = 0; a < v.pr_agents.size(); ++a) m.mu[{w, v.pr_agents[a]}] = *reps[a][d[i++]];
            ++res.examined;
            auto vals = eval_prob_all(f, m);
            for (int w = 0; w < k; ++w)
              if (vals[static_cast<std::size_t>(w)] == 1) {
                res.status = OracleStatus::SAT;
                res.model = std::move(m);
                res.world = w;
                return false;
              }
            return true;
          });
        });
        if (!go) return false;
      }
      return true;
    });
    if (stop) break;
  }
  return res;
}

std::size_t for_each_mod_model(const Formula& f, const OracleBounds& b, const std::function<bool(const ModModel&)>& fn) {
  check(b);
  Vocab v = vocab(f);
  if (!v.pr_agents.empty()) throw std::invalid_argument("for_each_mod_model: Pr atom in a modal formula");
  std::size_t count = 0;
  for (int k = 1; k <= b.outer; ++k) {
    bool go = for_each_frame(k, v.k_agents, v.actions, [&](const EventModel& frame) {
      std::vector<std::size_t> radix(v.vars.size() * static_cast<std::size_t>(k), static_cast<std::size_t>(b.grid + 1));
      return odometer(radix, [&](const std::vector<std::size_t>& d) {
        ModModel m;
        m.frame = frame;
        std::size_t i = 0;
        for (const auto& p : v.vars) {
          auto& vals = m.v[p];
          for (int w = 0; w < k; ++w) vals.push_back(rat(static_cast<long>(d[i++]), b.grid));
        }
        ++count;
        return fn(m);
      });
    });
    if (!go) break;
  }
  return count;
}

OracleModResult oracle_sat_mod(const Formula& f, const OracleBounds& b) {
  OracleModResult res;
  res.examined = for_each_mod_model(f, b, [&](const ModModel& m) {
    auto vals = eval_mod_all(f, m);
    for (int w = 0; w < m.frame.size(); ++w)
      if (vals[static_cast<std::size_t>(w)] == 1) {
        res.status = OracleStatus::SAT;
        res.model = m;
        res.world = w;
        return false;
      }
    return true;
  });
  return res;
}

std::size_t oracle_space_prob(const Formula& f, const OracleBounds& b) {
  check(b);
  Vocab v = vocab(f);
  std::size_t count = 0;
  for (int n = 1; n <= b.inner; ++n) {
    auto comps = compositions(n, b.grid);
    for_each_event_model(n, v, [&](const EventModel&) {
      for (int k = 1; k <= b.outer; ++k)
        for_each_frame(k, v.k_agents, v.actions, [&](const EventModel&) {
          std::vector<std::size_t> radix(static_cast<std::size_t>(k) * v.pr_agents.size(), comps.size());
          odometer(radix, [&](const std::vector<std::size_t>&) {
            ++count;
            return true;
          });
          return true;
        });
      return true;
    });
  }
  return count;
}

std::size_t oracle_space_mod(const Formula& f, const OracleBounds& b) {
  return for_each_mod_model(f, b, [](const ModModel&) { return true; });
}

}  // namespace eapr
