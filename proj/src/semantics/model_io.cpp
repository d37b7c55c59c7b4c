#include "eapr/model_io.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace eapr {

using nlohmann::json;

namespace {

EventModel worlds_from(const json& spec) {
  EventModel m;
  if (spec.is_number_integer()) {
    m = EventModel::with_worlds(spec.get<int>());
  } else if (spec.is_array()) {
    for (const auto& n : spec) m.add_world(n.get<std::string>());
  } else {
    throw std::invalid_argument("worlds must be a count or a list of names");
  }
  return m;
}

int world_ref(const EventModel& m, const json& ref) {
  if (ref.is_number_integer()) {
    int i = ref.get<int>();
    if (i < 0 || i >= m.size()) throw std::invalid_argument("world index out of range");
    return i;
  }
  auto name = ref.get<std::string>();
  for (int i = 0; i < m.size(); ++i)
    if (m.names[static_cast<std::size_t>(i)] == name) return i;
  throw std::invalid_argument("unknown world '" + name + "'");
}

void relations_from(EventModel& m, const json& obj) {
  if (obj.contains("epistemic")) {
    for (const auto& [agent, classes] : obj["epistemic"].items()) {
      std::vector<std::vector<int>> cls;
      for (const auto& c : classes) {
        cls.emplace_back();
        for (const auto& w : c) cls.back().push_back(world_ref(m, w));
      }
      m.set_classes(agent, cls);
    }
  }
  if (obj.contains("actions")) {
    for (const auto& [action, edges] : obj["actions"].items()) {
      m.R[action].resize(static_cast<std::size_t>(m.size()));
      for (const auto& e : edges) m.add_edge(action, world_ref(m, e.at(0)), world_ref(m, e.at(1)));
    }
  }
}

json relations_to(const EventModel& m) {
  json out = json::object();
  json ep = json::object();
  for (const auto& [agent, cls] : m.E) {
    std::map<int, json> groups;
    for (int w = 0; w < m.size(); ++w) groups[cls[static_cast<std::size_t>(w)]].push_back(m.names[static_cast<std::size_t>(w)]);
    json arr = json::array();
    for (auto& [id, g] : groups) arr.push_back(g);
    ep[agent] = arr;
  }
  out["epistemic"] = ep;
  json acts = json::object();
  for (const auto& [action, succ] : m.R) {
    json arr = json::array();
    for (int w = 0; w < m.size(); ++w)
      for (int u : succ[static_cast<std::size_t>(w)])
        arr.push_back({m.names[static_cast<std::size_t>(w)], m.names[static_cast<std::size_t>(u)]});
    acts[action] = arr;
  }
  out["actions"] = acts;
  return out;
}

Rational rational_from(const json& v) {
  if (v.is_number_integer()) return Rational(v.get<long>());
  return parse_rational(v.get<std::string>());
}

// The JSON refers to worlds by name, so repeated names are replaced.
EventModel distinct_names(EventModel m, const std::string& prefix) {
  std::set<std::string> seen;
  bool dup = false;
  for (const auto& n : m.names) dup = !seen.insert(n).second || dup;
  if (dup)
    for (int i = 0; i < m.size(); ++i) m.names[static_cast<std::size_t>(i)] = prefix + std::to_string(i);
  return m;
}

}  // namespace

SIModel si_model_from_json(const std::string& text) try {
  json j = json::parse(text);
  SIModel m;
  m.outer = worlds_from(j.at("outer_worlds"));
  relations_from(m.outer, j);
  const json& in = j.at("inner");
  m.inner = worlds_from(in.at("worlds"));
  relations_from(m.inner, in);
  if (in.contains("valuation")) {
    for (const auto& [var, ws] : in["valuation"].items()) {
      m.inner.V[var].assign(static_cast<std::size_t>(m.inner.size()), 0);
      for (const auto& w : ws) m.inner.set_truth(var, world_ref(m.inner, w), true);
    }
  }
  for (const auto& entry : j.at("mu")) {
    int w = world_ref(m.outer, entry.at("world"));
    std::vector<Rational> masses(static_cast<std::size_t>(m.inner.size()), Rational(0));
    for (const auto& [x, q] : entry.at("masses").items()) {
      // keys are strings; allow numeric strings as indices when no world has that name
      int idx = -1;
      for (int i = 0; i < m.inner.size(); ++i)
        if (m.inner.names[static_cast<std::size_t>(i)] == x) idx = i;
      if (idx < 0) idx = world_ref(m.inner, std::stoi(x));
      masses[static_cast<std::size_t>(idx)] = rational_from(q);
    }
    m.mu[{w, entry.at("agent").get<std::string>()}] = std::move(masses);
  }
  m.validate();
  return m;
} catch (const json::exception& e) {
  throw std::runtime_error(std::string("bad model: ") + e.what());
}

std::string to_json(const SIModel& src) {
  SIModel m = src;
  m.outer = distinct_names(src.outer, "w");
  m.inner = distinct_names(src.inner, "x");
  json j;
  j["outer_worlds"] = m.outer.names;
  json rel = relations_to(m.outer);
  j["epistemic"] = rel["epistemic"];
  j["actions"] = rel["actions"];
  json in = relations_to(m.inner);
  in["worlds"] = m.inner.names;
  json val = json::object();
  for (const auto& [var, ext] : m.inner.V) {
    json ws = json::array();
    for (int x = 0; x < m.inner.size(); ++x)
      if (ext[static_cast<std::size_t>(x)]) ws.push_back(m.inner.names[static_cast<std::size_t>(x)]);
    val[var] = ws;
  }
  in["valuation"] = val;
  j["inner"] = in;
  json mu = json::array();
  for (const auto& [key, masses] : m.mu) {
    json ms = json::object();
    for (int x = 0; x < m.inner.size(); ++x)
      if (masses[static_cast<std::size_t>(x)] != 0) ms[m.inner.names[static_cast<std::size_t>(x)]] = to_string(masses[static_cast<std::size_t>(x)], true);
    mu.push_back({{"world", m.outer.names[static_cast<std::size_t>(key.first)]}, {"agent", key.second}, {"masses", ms}});
  }
  j["mu"] = mu;
  return j.dump(2);
}

ModModel mod_model_from_json(const std::string& text) try {
  json j = json::parse(text);
  ModModel m;
  m.frame = worlds_from(j.at("worlds"));
  relations_from(m.frame, j);
  if (j.contains("values")) {
    for (const auto& [var, vals] : j["values"].items()) {
      auto& vec = m.v[var];
      vec.assign(static_cast<std::size_t>(m.frame.size()), Rational(0));
      for (const auto& [w, q] : vals.items()) {
        int idx = -1;
        for (int i = 0; i < m.frame.size(); ++i)
          if (m.frame.names[static_cast<std::size_t>(i)] == w) idx = i;
        if (idx < 0) idx = world_ref(m.frame, std::stoi(w));
        vec[static_cast<std::size_t>(idx)] = rational_from(q);
      }
    }
  }
  m.validate();
  return m;
} catch (const json::exception& e) {
  throw std::runtime_error(std::string("bad model: ") + e.what());
}

std::string to_json(const ModModel& src) {
  ModModel m = src;
  m.frame = distinct_names(src.frame, "w");
  json j = relations_to(m.frame);
  j["worlds"] = m.frame.names;
  json vals = json::object();
  for (const auto& [var, vec] : m.v) {
    json per = json::object();
    for (int w = 0; w < m.frame.size(); ++w) per[m.frame.names[static_cast<std::size_t>(w)]] = to_string(vec[static_cast<std::size_t>(w)], true);
    vals[var] = per;
  }
  j["values"] = vals;
  return j.dump(2);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace eapr
