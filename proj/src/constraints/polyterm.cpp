#include "eapr/constraints.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace eapr {

PolyTerm::PolyTerm(const Rational& c) {
  Rational k = c;
  k.canonicalize();
  if (k != 0) terms_[{}] = k;
}

PolyTerm PolyTerm::var(int id) {
  PolyTerm p;
  p.terms_[{id}] = 1;
  return p;
}

void PolyTerm::add(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Rational PolyTerm::constant() const {
  auto it = terms_.find({});
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational PolyTerm::coeff(int var) const {
  auto it = terms_.find({var});
  return it == terms_.end() ? Rational(0) : it->second;
}

int PolyTerm::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.size()));
  return d;
}

std::vector<int> PolyTerm::vars() const {
  std::set<int> vs;
  for (const auto& [m, c] : terms_) vs.insert(m.begin(), m.end());
  return {vs.begin(), vs.end()};
}

Rational PolyTerm::eval(const std::vector<Rational>& x) const {
  Rational s = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (int v : m) {
      if (v < 0 || static_cast<std::size_t>(v) >= x.size()) throw std::out_of_range("witness is missing variable " + std::to_string(v));
      t *= x[static_cast<std::size_t>(v)];
    }
    s += t;
  }
  return s;
}

PolyTerm& PolyTerm::operator+=(const PolyTerm& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

PolyTerm& PolyTerm::operator-=(const PolyTerm& o) {
  for (const auto& [m, c] : o.terms_) add(m, -c);
  return *this;
}

PolyTerm operator*(const PolyTerm& a, const PolyTerm& b) {
  PolyTerm r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      std::sort(m.begin(), m.end());
      r.add(m, ca * cb);
    }
  return r;
}

std::string PolyTerm::str(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    bool unit = mag == 1 && !m.empty();
    if (!unit) os << to_string(mag);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!unit || i > 0) os << "*";
      int v = m[i];
      if (static_cast<std::size_t>(v) < names.size() && !names[static_cast<std::size_t>(v)].empty())
        os << names[static_cast<std::size_t>(v)];
      else
        os << "v" << v;
    }
  }
  return os.str();
}

const char* rel_name(Rel r) {
  switch (r) {
    case Rel::LE: return "<=";
    case Rel::LT: return "<";
    case Rel::EQ: return "=";
  }
  return "?";
}

const char* status_name(Status s) {
  switch (s) {
    case Status::SAT: return "SAT";
    case Status::UNSAT: return "UNSAT";
    case Status::UNKNOWN: return "UNKNOWN";
  }
  return "?";
}

int IneqSystem::new_var(std::string name) {
  int id = num_vars();
  names.push_back(name.empty() ? "v" + std::to_string(id) : std::move(name));
  return id;
}

void IneqSystem::append(const IneqSystem& o) {
  if (o.num_vars() > num_vars()) names.resize(static_cast<std::size_t>(o.num_vars()));
  rows.insert(rows.end(), o.rows.begin(), o.rows.end());
}

bool IneqSystem::is_linear() const {
  return std::all_of(rows.begin(), rows.end(), [](const Ineq& r) { return r.normal().is_linear(); });
}

std::string IneqSystem::str() const {
  std::ostringstream os;
  for (const auto& r : rows) os << r.lhs.str(names) << " " << rel_name(r.rel) << " " << r.rhs.str(names) << "\n";
  return os.str();
}

bool substitute_check(const IneqSystem& s, const std::vector<Rational>& w) {
  if (w.size() != static_cast<std::size_t>(s.num_vars()))
    throw std::invalid_argument("witness has " + std::to_string(w.size()) + " values for " + std::to_string(s.num_vars()) + " variables");
  for (const auto& x : w)
    if (x < 0 || x > 1) return false;
  for (const auto& r : s.rows) {
    Rational v = r.normal().eval(w);
    bool ok = r.rel == Rel::LE ? v <= 0 : r.rel == Rel::LT ? v < 0 : v == 0;
    if (!ok) return false;
  }
  return true;
}

IneqSystem substitute(const IneqSystem& s, const std::map<int, Rational>& fixed) {
  IneqSystem out;
  out.names = s.names;
  for (const auto& r : s.rows) {
    PolyTerm p, n = r.normal();
    for (const auto& [m, c] : n.terms()) {
      PolyTerm t(c);
      for (int v : m) {
        auto it = fixed.find(v);
        t = t * (it == fixed.end() ? PolyTerm::var(v) : PolyTerm(it->second));
      }
      p += t;
    }
    out.add(p, r.rel, PolyTerm(0));
  }
  return out;
}

std::string to_smtlib(const IneqSystem& s) {
  std::ostringstream os;
  auto num = [](const Rational& q) {
    Rational a = q < 0 ? Rational(-q) : q;
    std::string body = a.get_den() == 1 ? a.get_num().get_str() + ".0"
                                        : "(/ " + a.get_num().get_str() + ".0 " + a.get_den().get_str() + ".0)";
    return q < 0 ? "(- " + body + ")" : body;
  };
  auto poly = [&](const PolyTerm& p) {
    if (p.terms().empty()) return std::string("0.0");
    std::string out = "(+";
    for (const auto& [m, c] : p.terms()) {
      if (m.empty()) {
        out += " " + num(c);
        continue;
      }
      out += " (* " + num(c);
      for (int v : m) out += " x" + std::to_string(v);
      out += ")";
    }
    return out + " 0.0)";
  };
  os << "(set-logic QF_NRA)\n";
  for (int v = 0; v < s.num_vars(); ++v) {
    os << "; x" << v << " = " << s.names[static_cast<std::size_t>(v)] << "\n";
    os << "(declare-fun x" << v << " () Real)\n";
    os << "(assert (and (<= 0.0 x" << v << ") (<= x" << v << " 1.0)))\n";
  }
  for (const auto& r : s.rows) {
    const char* op = r.rel == Rel::LE ? "<=" : r.rel == Rel::LT ? "<" : "=";
    os << "(assert (" << op << " " << poly(r.lhs) << " " << poly(r.rhs) << "))\n";
  }
  os << "(check-sat)\n";
  return os.str();
}

}  // namespace eapr
