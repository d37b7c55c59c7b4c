#include "eapr/syntax.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

namespace eapr {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  // 64-bit FNV-style combine; stable across runs.
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * 0x100000001b3ULL;
}

std::size_t str_hash(const std::string& s) {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

}  // namespace

Rational parse_rational(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty rational");
  std::string str(s);
  Rational q;
  if (q.set_str(str, 10) != 0 || str.find_first_not_of("0123456789/-") != std::string::npos)
    throw std::invalid_argument("malformed rational '" + str + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q, bool force_slash) {
  if (q.get_den() == 1 && !force_slash) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// ---------------------------------------------------------------- Event

struct Event::Node {
  Kind k;
  std::string name;
  Event a, b;
  std::size_t h = 0;
};

Event::Kind Event::kind() const { return n_->k; }
const std::string& Event::name() const { return n_->name; }
const Event& Event::arg() const { return n_->a; }
const Event& Event::rhs() const { return n_->b; }
std::size_t Event::hash() const { return n_ ? n_->h : 0; }

struct Formula::Node {
  Kind k;
  std::string name;
  Formula a, b;
  Event ev;
  Rational q;
  std::size_t h = 0;
};

struct NodeFactory {
  static Event make(Event::Kind k, std::string name, Event a, Event b) {
    Event::Node n{k, std::move(name), std::move(a), std::move(b)};
    std::size_t h = mix(static_cast<std::size_t>(k) + 1, str_hash(n.name));
    if (n.a.valid()) h = mix(h, n.a.hash());
    if (n.b.valid()) h = mix(h, n.b.hash());
    n.h = h;
    return Event(std::make_shared<const Event::Node>(std::move(n)));
  }
  static Formula make(Formula::Kind k, std::string name, Formula a, Formula b, Event ev = {},
                      Rational q = Rational(0)) {
    Formula::Node n{k, std::move(name), std::move(a), std::move(b), std::move(ev), std::move(q)};
    std::size_t h = mix(static_cast<std::size_t>(k) + 101, str_hash(n.name));
    if (n.a.valid()) h = mix(h, n.a.hash());
    if (n.b.valid()) h = mix(h, n.b.hash());
    if (n.ev.valid()) h = mix(h, n.ev.hash());
    if (k == Formula::Kind::Const) h = mix(h, str_hash(to_string(n.q, true)));
    n.h = h;
    return Formula(std::make_shared<const Formula::Node>(std::move(n)));
  }
};

Event Event::var(std::string p) { return NodeFactory::make(Kind::Var, std::move(p), {}, {}); }
Event Event::neg(const Event& a) { return NodeFactory::make(Kind::Not, {}, a, {}); }
Event Event::conj(const Event& a, const Event& b) { return NodeFactory::make(Kind::And, {}, a, b); }
Event Event::knows(std::string agent, const Event& a) {
  return NodeFactory::make(Kind::Knows, std::move(agent), a, {});
}
Event Event::box(std::string action, const Event& a) {
  return NodeFactory::make(Kind::Box, std::move(action), a, {});
}
Event Event::diamond(std::string action, const Event& a) { return neg(box(std::move(action), neg(a))); }
Event Event::kdiamond(std::string agent, const Event& a) { return neg(knows(std::move(agent), neg(a))); }

int Event::compare(const Event& x, const Event& y) {
  if (x.n_ == y.n_) return 0;
  if (!x.n_) return -1;
  if (!y.n_) return 1;
  if (x.n_->h != y.n_->h) return x.n_->h < y.n_->h ? -1 : 1;
  if (x.n_->k != y.n_->k) return x.n_->k < y.n_->k ? -1 : 1;
  if (int c = x.n_->name.compare(y.n_->name)) return c < 0 ? -1 : 1;
  if (int c = compare(x.n_->a, y.n_->a)) return c;
  return compare(x.n_->b, y.n_->b);
}

bool operator==(const Event& a, const Event& b) { return Event::compare(a, b) == 0; }

// ---------------------------------------------------------------- Formula

Formula::Kind Formula::kind() const { return n_->k; }
const std::string& Formula::name() const { return n_->name; }
const Formula& Formula::arg() const { return n_->a; }
const Formula& Formula::rhs() const { return n_->b; }
const Event& Formula::event() const { return n_->ev; }
const Rational& Formula::value() const { return n_->q; }
std::size_t Formula::hash() const { return n_ ? n_->h : 0; }

Formula Formula::var(std::string p) { return NodeFactory::make(Kind::Var, std::move(p), {}, {}); }
Formula Formula::pr(std::string agent, const Event& a) {
  return NodeFactory::make(Kind::Pr, std::move(agent), {}, {}, a);
}
Formula Formula::neg(const Formula& a) { return NodeFactory::make(Kind::Neg, {}, a, {}); }
Formula Formula::imp(const Formula& a, const Formula& b) { return NodeFactory::make(Kind::Imp, {}, a, b); }
Formula Formula::prod(const Formula& a, const Formula& b) { return NodeFactory::make(Kind::Prod, {}, a, b); }
Formula Formula::pimp(const Formula& a, const Formula& b) { return NodeFactory::make(Kind::PImp, {}, a, b); }
Formula Formula::constant(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c < 0 || c > 1) throw std::invalid_argument("constant outside [0,1]: " + to_string(c));
  return NodeFactory::make(Kind::Const, {}, {}, {}, {}, c);
}
Formula Formula::half() { return constant(Rational(1, 2)); }
Formula Formula::knows(std::string agent, const Formula& a) {
  return NodeFactory::make(Kind::Knows, std::move(agent), a, {});
}
Formula Formula::box(std::string action, const Formula& a) {
  return NodeFactory::make(Kind::Box, std::move(action), a, {});
}

Formula Formula::one() { return imp(half(), half()); }
Formula Formula::zero() { return neg(one()); }
Formula Formula::oplus(const Formula& a, const Formula& b) { return imp(neg(a), b); }
Formula Formula::odot(const Formula& a, const Formula& b) { return neg(imp(a, neg(b))); }
Formula Formula::delta(const Formula& a) { return pimp(neg(a), zero()); }
Formula Formula::diamond(std::string action, const Formula& a) { return neg(box(std::move(action), neg(a))); }
Formula Formula::kdiamond(std::string agent, const Formula& a) { return neg(knows(std::move(agent), neg(a))); }
Formula Formula::biimp(const Formula& a, const Formula& b) { return odot(imp(a, b), imp(b, a)); }

Formula Formula::dyadic(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c < 0 || c > 1) throw std::invalid_argument("dyadic constant outside [0,1]");
  mpz_class den = c.get_den();
  unsigned m = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++m;
  }
  if (den != 1) throw std::invalid_argument("not dyadic: " + to_string(c) + " (use a native constant)");
  if (c == 0) return zero();
  if (c == 1) return one();
  // c = sum of 2^-i over the set bits of the numerator scaled to 2^m.
  mpz_class num = c.get_num();
  std::vector<Formula> terms;
  for (unsigned i = 1; i <= m; ++i) {
    mpz_class bit = (num >> (m - i)) & 1;
    if (bit == 0) continue;
    Formula t = half();
    for (unsigned j = 1; j < i; ++j) t = prod(half(), t);
    terms.push_back(t);
  }
  Formula acc = terms.back();
  for (std::size_t i = terms.size() - 1; i-- > 0;) acc = oplus(terms[i], acc);
  return acc;
}

int Formula::compare(const Formula& x, const Formula& y) {
  if (x.n_ == y.n_) return 0;
  if (!x.n_) return -1;
  if (!y.n_) return 1;
  if (x.n_->h != y.n_->h) return x.n_->h < y.n_->h ? -1 : 1;
  if (x.n_->k != y.n_->k) return x.n_->k < y.n_->k ? -1 : 1;
  if (int c = x.n_->name.compare(y.n_->name)) return c < 0 ? -1 : 1;
  if (x.n_->k == Kind::Const) {
    int c = cmp(x.n_->q, y.n_->q);
    if (c) return c < 0 ? -1 : 1;
  }
  if (int c = Event::compare(x.n_->ev, y.n_->ev)) return c;
  if (int c = compare(x.n_->a, y.n_->a)) return c;
  return compare(x.n_->b, y.n_->b);
}

bool operator==(const Formula& a, const Formula& b) { return Formula::compare(a, b) == 0; }

Formula desugar(Connective c, const std::vector<Formula>& args, const std::string& label, const Rational& q) {
  auto need = [&](std::size_t n) {
    if (args.size() != n) throw std::invalid_argument("wrong arity for derived connective");
  };
  switch (c) {
    case Connective::One: need(0); return Formula::one();
    case Connective::Zero: need(0); return Formula::zero();
    case Connective::Oplus: need(2); return Formula::oplus(args[0], args[1]);
    case Connective::Odot: need(2); return Formula::odot(args[0], args[1]);
    case Connective::Delta: need(1); return Formula::delta(args[0]);
    case Connective::Diamond: need(1); return Formula::diamond(label, args[0]);
    case Connective::KDiamond: need(1); return Formula::kdiamond(label, args[0]);
    case Connective::Rational: need(0); return Formula::dyadic(q);
  }
  throw std::invalid_argument("unknown connective");
}

ParseError::ParseError(std::size_t offset, const std::string& msg)
    : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + msg), offset_(offset) {}

// ---------------------------------------------------------------- queries

std::size_t size(const Event& e) {
  switch (e.kind()) {
    case Event::Kind::Var: return 1;
    case Event::Kind::Not: return 1 + size(e.arg());
    case Event::Kind::And: return 1 + size(e.arg()) + size(e.rhs());
    case Event::Kind::Knows:
    case Event::Kind::Box: return 2 + size(e.arg());
  }
  return 0;
}

std::size_t size(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Var:
    case Formula::Kind::Const: return 1;
    case Formula::Kind::Pr: return 2 + size(f.event());
    case Formula::Kind::Neg: return 1 + size(f.arg());
    case Formula::Kind::Imp:
    case Formula::Kind::Prod:
    case Formula::Kind::PImp: return 1 + size(f.arg()) + size(f.rhs());
    case Formula::Kind::Knows:
    case Formula::Kind::Box: return 2 + size(f.arg());
  }
  return 0;
}

std::size_t modal_depth(const Event& e) {
  switch (e.kind()) {
    case Event::Kind::Var: return 0;
    case Event::Kind::Not: return modal_depth(e.arg());
    case Event::Kind::And: return std::max(modal_depth(e.arg()), modal_depth(e.rhs()));
    default: return 1 + modal_depth(e.arg());
  }
}

std::size_t modal_depth(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Var:
    case Formula::Kind::Const:
    case Formula::Kind::Pr: return 0;
    case Formula::Kind::Neg: return modal_depth(f.arg());
    case Formula::Kind::Knows:
    case Formula::Kind::Box: return 1 + modal_depth(f.arg());
    default: return std::max(modal_depth(f.arg()), modal_depth(f.rhs()));
  }
}

namespace {

void collect(const Event& e, std::vector<Event>& out, std::unordered_set<Event, EventHash>& seen) {
  if (seen.count(e)) return;
  if (e.arg().valid()) collect(e.arg(), out, seen);
  if (e.rhs().valid()) collect(e.rhs(), out, seen);
  seen.insert(e);
  out.push_back(e);
}

void collect(const Formula& f, std::vector<Formula>& out, std::unordered_set<Formula, FormulaHash>& seen) {
  if (seen.count(f)) return;
  if (f.arg().valid()) collect(f.arg(), out, seen);
  if (f.rhs().valid()) collect(f.rhs(), out, seen);
  seen.insert(f);
  out.push_back(f);
}

void walk(const Event& e, const std::function<void(const Event&)>& fn) {
  fn(e);
  if (e.arg().valid()) walk(e.arg(), fn);
  if (e.rhs().valid()) walk(e.rhs(), fn);
}

void walk(const Formula& f, const std::function<void(const Formula&)>& fn) {
  fn(f);
  if (f.arg().valid()) walk(f.arg(), fn);
  if (f.rhs().valid()) walk(f.rhs(), fn);
}

}  // namespace

std::vector<Event> subformulas(const Event& e) {
  std::vector<Event> out;
  std::unordered_set<Event, EventHash> seen;
  collect(e, out, seen);
  return out;
}

std::vector<Formula> subformulas(const Formula& f) {
  std::vector<Formula> out;
  std::unordered_set<Formula, FormulaHash> seen;
  collect(f, out, seen);
  return out;
}

std::vector<Event> closure_neg(const Event& e) {
  std::vector<Event> out;
  std::unordered_set<Event, EventHash> seen;
  for (const Event& s : subformulas(e)) {
    for (const Event& t : {s, Event::neg(s)}) {
      if (seen.insert(t).second) out.push_back(t);
    }
  }
  return out;
}

std::set<std::string> agents_of(const Event& e) {
  std::set<std::string> out;
  walk(e, [&](const Event& s) {
    if (s.kind() == Event::Kind::Knows) out.insert(s.name());
  });
  return out;
}

std::set<std::string> actions_of(const Event& e) {
  std::set<std::string> out;
  walk(e, [&](const Event& s) {
    if (s.kind() == Event::Kind::Box) out.insert(s.name());
  });
  return out;
}

std::set<std::string> variables_of(const Event& e) {
  std::set<std::string> out;
  walk(e, [&](const Event& s) {
    if (s.kind() == Event::Kind::Var) out.insert(s.name());
  });
  return out;
}

std::set<std::string> agents_of(const Formula& f) {
  std::set<std::string> out;
  walk(f, [&](const Formula& s) {
    if (s.kind() == Formula::Kind::Knows || s.kind() == Formula::Kind::Pr) out.insert(s.name());
  });
  return out;
}

std::set<std::string> actions_of(const Formula& f) {
  std::set<std::string> out;
  walk(f, [&](const Formula& s) {
    if (s.kind() == Formula::Kind::Box) out.insert(s.name());
  });
  return out;
}

std::set<std::string> variables_of(const Formula& f) {
  std::set<std::string> out;
  walk(f, [&](const Formula& s) {
    if (s.kind() == Formula::Kind::Var) out.insert(s.name());
    if (s.kind() == Formula::Kind::Pr) {
      auto inner = variables_of(s.event());
      out.insert(inner.begin(), inner.end());
    }
  });
  return out;
}

std::vector<std::pair<std::string, Event>> pr_atoms(const Formula& f) {
  std::vector<std::pair<std::string, Event>> out;
  walk(f, [&](const Formula& s) {
    if (s.kind() != Formula::Kind::Pr) return;
    for (const auto& [a, e] : out)
      if (a == s.name() && e == s.event()) return;
    out.emplace_back(s.name(), s.event());
  });
  return out;
}

bool has_pr(const Formula& f) {
  bool found = false;
  walk(f, [&](const Formula& s) { found = found || s.kind() == Formula::Kind::Pr; });
  return found;
}

bool has_var(const Formula& f) {
  bool found = false;
  walk(f, [&](const Formula& s) { found = found || s.kind() == Formula::Kind::Var; });
  return found;
}

bool uses_product(const Formula& f) {
  bool found = false;
  walk(f, [&](const Formula& s) {
    found = found || s.kind() == Formula::Kind::Prod || s.kind() == Formula::Kind::PImp;
  });
  return found;
}

bool is_ground(const Formula& f) {
  bool ground = true;
  walk(f, [&](const Formula& s) {
    switch (s.kind()) {
      case Formula::Kind::Var:
      case Formula::Kind::Pr:
      case Formula::Kind::Knows:
      case Formula::Kind::Box: ground = false; break;
      default: break;
    }
  });
  return ground;
}

}  // namespace eapr
