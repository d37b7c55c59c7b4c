#include "eapr/classical.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>

namespace eapr {

namespace {

using EK = Event::Kind;

struct Lit {
  int w;
  Event e;
  bool sign;
};

struct CBranch {
  std::vector<std::map<std::string, int>> cls;
  std::vector<std::tuple<int, std::string, int>> edges;
  std::vector<Lit> lits;
  std::vector<char> done;
  std::vector<std::set<int>> sent;
  std::set<std::tuple<int, Event, bool>> seen;
  std::map<std::tuple<std::string, int, Event>, int> k_witness;
  std::map<std::tuple<int, std::string, Event>, int> box_witness;
  std::vector<std::string> agents;
  int next_class = 0;
  bool clash = false;

  int add_state(const std::map<std::string, int>& keep = {}) {
    std::map<std::string, int> c;
    for (const auto& a : agents) {
      auto it = keep.find(a);
      c[a] = it != keep.end() ? it->second : next_class++;
    }
    cls.push_back(std::move(c));
    return static_cast<int>(cls.size()) - 1;
  }

  void add(int w, const Event& e, bool sign) {
    if (seen.count({w, e, !sign})) clash = true;
    if (!seen.emplace(w, e, sign).second) return;
    lits.push_back({w, e, sign});
    done.push_back(e.kind() == EK::Var);
    sent.emplace_back();
  }

  std::vector<int> targets(const Lit& l) const {
    std::vector<int> out;
    if (l.e.kind() == EK::Knows) {
      int k = cls[static_cast<std::size_t>(l.w)].at(l.e.name());
      for (int u = 0; u < static_cast<int>(cls.size()); ++u)
        if (cls[static_cast<std::size_t>(u)].at(l.e.name()) == k) out.push_back(u);
    } else {
      for (const auto& [from, a, to] : edges)
        if (from == l.w && a == l.e.name()) out.push_back(to);
    }
    return out;
  }
};

// 0: non-branching, 1: branching, 2: state creation, 3: propagation
int priority(const CBranch& b, std::size_t i) {
  const Lit& l = b.lits[i];
  switch (l.e.kind()) {
    case EK::Var: return -1;
    case EK::Not: return 0;
    case EK::And: return l.sign ? 0 : 1;
    case EK::Knows:
    case EK::Box:
      if (!l.sign) return 2;
      for (int u : b.targets(l))
        if (!b.sent[i].count(u)) return 3;
      return -1;
  }
  return -1;
}

int next_premise(const CBranch& b) {
  int best = -1, best_p = 4;
  for (std::size_t i = 0; i < b.lits.size(); ++i) {
    if (b.done[i]) continue;
    int p = priority(b, i);
    if (p >= 0 && p < best_p) {
      best = static_cast<int>(i);
      best_p = p;
    }
  }
  return best;
}

void apply(CBranch& b, std::optional<CBranch>& right, std::size_t i) {
  Lit l = b.lits[i];
  const Event& e = l.e;
  switch (e.kind()) {
    case EK::Var: return;
    case EK::Not:
      b.done[i] = 1;
      b.add(l.w, e.arg(), !l.sign);
      return;
    case EK::And:
      b.done[i] = 1;
      if (l.sign) {
        b.add(l.w, e.arg(), true);
        b.add(l.w, e.rhs(), true);
      } else {
        right = b;
        b.add(l.w, e.arg(), false);
        right->add(l.w, e.rhs(), false);
      }
      return;
    case EK::Knows:
    case EK::Box:
      if (!l.sign) {
        b.done[i] = 1;
        if (e.kind() == EK::Knows) {
          int k = b.cls[static_cast<std::size_t>(l.w)].at(e.name());
          auto key = std::make_tuple(e.name(), k, e.arg());
          auto it = b.k_witness.find(key);
          int u = it != b.k_witness.end() ? it->second : -1;
          if (u < 0) {
            u = b.add_state({{e.name(), k}});
            b.k_witness.emplace(key, u);
          }
          b.add(u, e.arg(), false);
        } else {
          auto key = std::make_tuple(l.w, e.name(), e.arg());
          auto it = b.box_witness.find(key);
          int u = it != b.box_witness.end() ? it->second : -1;
          if (u < 0) {
            u = b.add_state();
            b.edges.emplace_back(l.w, e.name(), u);
            b.box_witness.emplace(key, u);
          }
          b.add(u, e.arg(), false);
        }
      } else {
        for (int u : b.targets(l)) {
          if (b.sent[i].count(u)) continue;
          b.sent[i].insert(u);
          b.add(u, e.arg(), true);
        }
      }
      return;
  }
}

EventModel read_model(const CBranch& b, const std::set<std::string>& vars, const std::set<std::string>& actions) {
  int n = static_cast<int>(b.cls.size());
  EventModel m = EventModel::with_worlds(n);
  for (const auto& a : b.agents) {
    std::map<int, int> renum;
    std::vector<int> ids;
    for (int w = 0; w < n; ++w) {
      int c = b.cls[static_cast<std::size_t>(w)].at(a);
      auto it = renum.emplace(c, static_cast<int>(renum.size())).first;
      ids.push_back(it->second);
    }
    m.E[a] = std::move(ids);
  }
  for (const auto& a : actions) m.R[a].assign(static_cast<std::size_t>(n), {});
  for (const auto& [from, a, to] : b.edges) m.add_edge(a, from, to);
  for (const auto& p : vars) m.V[p].assign(static_cast<std::size_t>(n), 0);
  for (const auto& l : b.lits)
    if (l.e.kind() == EK::Var && l.sign) m.set_truth(l.e.name(), l.w, true);
  return m;
}

}  // namespace

EaResult ea_sat(const std::vector<Event>& gamma) {
  std::set<std::string> agents, actions, vars;
  for (const auto& g : gamma) {
    for (const auto& a : agents_of(g)) agents.insert(a);
    for (const auto& a : actions_of(g)) actions.insert(a);
    for (const auto& p : variables_of(g)) vars.insert(p);
  }
  CBranch root;
  root.agents.assign(agents.begin(), agents.end());
  root.add_state();
  for (const auto& g : gamma) root.add(0, g, true);

  EaResult res;
  std::vector<CBranch> stack{std::move(root)};
  while (!stack.empty()) {
    CBranch b = std::move(stack.back());
    stack.pop_back();
    while (!b.clash) {
      int i = next_premise(b);
      if (i < 0) break;
      std::optional<CBranch> right;
      apply(b, right, static_cast<std::size_t>(i));
      if (right && !right->clash) stack.push_back(std::move(*right));
    }
    res.states = std::max(res.states, b.cls.size());
    if (b.clash) continue;
    res.sat = true;
    res.model = read_model(b, vars, actions);
    for (const auto& g : gamma)
      if (!holds(g, res.model, 0)) throw std::logic_error("ea_sat model fails " + to_string(g));
    return res;
  }
  return res;
}

bool MCS::contains(const Event& e) const { return std::binary_search(members.begin(), members.end(), e); }

std::vector<MCS> mcs_enumerate(const std::vector<Event>& sf) {
  std::set<Event> all(sf.begin(), sf.end());
  // one pair per element whose negation is present; elements without one are
  // their own pair partner's negation
  std::vector<std::pair<Event, Event>> pairs;
  std::set<Event> covered;
  for (const auto& e : all) {
    Event ne = Event::neg(e);
    if (all.count(ne)) {
      pairs.emplace_back(e, ne);
      covered.insert(e);
      covered.insert(ne);
    }
  }
  for (const auto& e : all)
    if (!covered.count(e)) throw std::invalid_argument("closure set is not negation-closed at " + to_string(e));

  std::vector<MCS> out;
  std::vector<Event> chosen;
  std::set<std::vector<Event>> found;
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (!ea_sat(chosen).sat) return;
    if (k == pairs.size()) {
      std::set<Event> s(chosen.begin(), chosen.end());
      std::vector<Event> members(s.begin(), s.end());
      if (!found.insert(members).second) return;
      EaResult r = ea_sat(members);
      out.push_back({std::move(members), std::move(r.model)});
      return;
    }
    for (const Event& pick : {pairs[k].first, pairs[k].second}) {
      chosen.push_back(pick);
      self(self, k + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

MCSModel build_mcs_model(const std::vector<Event>& sf) {
  MCSModel res;
  res.worlds = mcs_enumerate(sf);
  int n = static_cast<int>(res.worlds.size());
  EventModel& m = res.model;
  m = EventModel::with_worlds(n);
  std::set<std::string> agents, actions, vars;
  for (const auto& e : sf) {
    for (const auto& a : agents_of(e)) agents.insert(a);
    for (const auto& a : actions_of(e)) actions.insert(a);
    for (const auto& p : variables_of(e)) vars.insert(p);
  }
  for (const auto& a : agents) {
    std::vector<Event> ks;
    for (const auto& e : sf)
      if (e.kind() == EK::Knows && e.name() == a) ks.push_back(e);
    std::vector<std::vector<int>> classes;
    std::vector<int> ids(static_cast<std::size_t>(n), -1);
    for (int u = 0; u < n; ++u) {
      if (ids[static_cast<std::size_t>(u)] >= 0) continue;
      ids[static_cast<std::size_t>(u)] = static_cast<int>(classes.size());
      classes.push_back({u});
      for (int v = u + 1; v < n; ++v) {
        bool agree = std::all_of(ks.begin(), ks.end(), [&](const Event& k) {
          return res.worlds[static_cast<std::size_t>(u)].contains(k) == res.worlds[static_cast<std::size_t>(v)].contains(k);
        });
        if (agree && ids[static_cast<std::size_t>(v)] < 0) ids[static_cast<std::size_t>(v)] = ids[static_cast<std::size_t>(u)];
      }
    }
    m.E[a] = std::move(ids);
  }
  for (const auto& a : actions) {
    m.R[a].assign(static_cast<std::size_t>(n), {});
    std::vector<Event> boxes;
    for (const auto& e : sf)
      if (e.kind() == EK::Box && e.name() == a) boxes.push_back(e);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        bool ok = std::all_of(boxes.begin(), boxes.end(), [&](const Event& b) {
          return !res.worlds[static_cast<std::size_t>(u)].contains(b) || res.worlds[static_cast<std::size_t>(v)].contains(b.arg());
        });
        if (ok) m.add_edge(a, u, v);
      }
  }
  for (const auto& p : vars) {
    m.V[p].assign(static_cast<std::size_t>(n), 0);
    for (int u = 0; u < n; ++u)
      if (res.worlds[static_cast<std::size_t>(u)].contains(Event::var(p))) m.set_truth(p, u, true);
  }
  return res;
}

std::vector<std::pair<int, Event>> truth_lemma_failures(const MCSModel& m, const std::vector<Event>& sf) {
  std::vector<std::pair<int, Event>> bad;
  for (const auto& e : sf) {
    WorldSet d = denote(e, m.model);
    for (int u = 0; u < static_cast<int>(m.worlds.size()); ++u)
      if (static_cast<bool>(d[static_cast<std::size_t>(u)]) != m.worlds[static_cast<std::size_t>(u)].contains(e)) bad.emplace_back(u, e);
  }
  return bad;
}

}  // namespace eapr
