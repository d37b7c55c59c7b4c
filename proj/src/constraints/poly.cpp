#include "eapr/constraints.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace eapr {

namespace {

// Endpoints carry an open flag; open means the bound is never attained.
struct Iv {
  Rational lo, hi;
  bool lo_open = false, hi_open = false;
};
using Box = std::vector<Iv>;

bool empty(const Iv& x) { return x.lo > x.hi || (x.lo == x.hi && (x.lo_open || x.hi_open)); }

// Every variable is >= 0, so a monomial ranges over [prod lo, prod hi]. An
// endpoint of a product is attained when every factor attains its endpoint or
// some factor attains 0 there.
Iv range(const PolyTerm& p, const Box& b) {
  Iv r{0, 0};
  for (const auto& [m, c] : p.terms()) {
    Iv t{c, c};
    bool all_lo = true, all_hi = true, zero_lo = false, zero_hi = false;
    for (int v : m) {
      const Iv& x = b[static_cast<std::size_t>(v)];
      t.lo *= x.lo;
      t.hi *= x.hi;
      all_lo = all_lo && !x.lo_open;
      all_hi = all_hi && !x.hi_open;
      zero_lo = zero_lo || (x.lo == 0 && !x.lo_open);
      zero_hi = zero_hi || (x.hi == 0 && !x.hi_open);
    }
    t.lo_open = !(all_lo || zero_lo);
    t.hi_open = !(all_hi || zero_hi);
    if (c < 0) {
      std::swap(t.lo, t.hi);
      std::swap(t.lo_open, t.hi_open);
    }
    r.lo += t.lo;
    r.hi += t.hi;
    r.lo_open = r.lo_open || t.lo_open;
    r.hi_open = r.hi_open || t.hi_open;
  }
  return r;
}

bool positive(const Iv& r) { return r.lo > 0 || (r.lo == 0 && r.lo_open); }
bool negative(const Iv& r) { return r.hi < 0 || (r.hi == 0 && r.hi_open); }

bool refuted_row(const Iv& r, Rel rel) {
  switch (rel) {
    case Rel::LE: return positive(r);
    case Rel::LT: return r.lo >= 0;
    case Rel::EQ: return positive(r) || negative(r);
  }
  return false;
}

// Contracted bounds are rounded outward to a 2^-32 grid once their
// denominators grow, otherwise repeated contraction blows up the digits.
Rational round_down(const Rational& q) {
  if (mpz_sizeinbase(q.get_den().get_mpz_t(), 2) <= 40) return q;
  mpz_class scaled = q.get_num() << 32;
  mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), q.get_den().get_mpz_t());
  Rational r(scaled, mpz_class(1) << 32);
  r.canonicalize();
  return r;
}
Rational round_up(const Rational& q) { return -round_down(-q); }

void tighten_hi(Iv& x, Rational up, bool open, bool& changed) {
  Rational r = round_up(up);
  if (r != up) open = false;
  if (r < x.hi || (r == x.hi && open && !x.hi_open)) {
    x.hi = r;
    x.hi_open = open;
    changed = true;
  }
}

void tighten_lo(Iv& x, Rational low, bool open, bool& changed) {
  Rational r = round_down(low);
  if (r != low) open = false;
  if (r > x.lo || (r == x.lo && open && !x.lo_open)) {
    x.lo = r;
    x.lo_open = open;
    changed = true;
  }
}

// Contract v from g*v + r <= 0 (< 0 when strict) where g keeps one sign on
// the box. Returns false when the box becomes empty.
bool contract_le(const PolyTerm& g, const PolyTerm& r, int v, bool strict, Box& b, bool& changed) {
  Iv gi = range(g, b), ri = range(r, b);
  auto& x = b[static_cast<std::size_t>(v)];
  if (positive(gi)) {
    // v <= -r/g
    if (ri.lo >= 0) tighten_hi(x, -ri.lo / gi.hi, strict, changed);
    else if (gi.lo > 0) tighten_hi(x, -ri.lo / gi.lo, strict, changed);
  } else if (negative(gi)) {
    // v >= r/|g|
    if (ri.lo >= 0) tighten_lo(x, ri.lo / -gi.lo, strict, changed);
    else if (gi.hi < 0) tighten_lo(x, ri.lo / -gi.hi, strict, changed);
  }
  return !empty(x);
}

struct Split {
  PolyTerm g, r;  // p = g*v + r
};

std::optional<Split> split_on(const PolyTerm& p, int v) {
  Split s;
  for (const auto& [m, c] : p.terms()) {
    auto n = std::count(m.begin(), m.end(), v);
    if (n >= 2) return std::nullopt;
    PolyTerm t(c);
    for (int u : m)
      if (u != v) t = t * PolyTerm::var(u);
    (n == 1 ? s.g : s.r) += t;
  }
  if (s.g.terms().empty()) return std::nullopt;
  return s;
}

class Solver {
 public:
  Solver(const IneqSystem& s, const PolyOptions& o) : s_(s), opts_(o) {
    for (const auto& row : s.rows) normals_.push_back(row.normal());
    for (const auto& p : normals_)
      for (const auto& [m, c] : p.terms())
        if (m.size() >= 2) {
          nonlinear_.push_back(m);
          for (int v : m) in_product_.push_back(v);
        }
    std::sort(nonlinear_.begin(), nonlinear_.end());
    nonlinear_.erase(std::unique(nonlinear_.begin(), nonlinear_.end()), nonlinear_.end());
    std::sort(in_product_.begin(), in_product_.end());
    in_product_.erase(std::unique(in_product_.begin(), in_product_.end()), in_product_.end());
  }

  FeasibilityResult run() {
    FeasibilityResult res;
    int n = s_.num_vars();
    std::vector<Box> stack{Box(static_cast<std::size_t>(n), Iv{0, 1})};
    std::size_t boxes = 0;
    bool undecided = false;
    while (!stack.empty()) {
      if (boxes >= opts_.budget) {
        res.status = Status::UNKNOWN;
        res.note = "poly: budget of " + std::to_string(opts_.budget) + " boxes spent";
        return res;
      }
      Box b = std::move(stack.back());
      stack.pop_back();
      ++boxes;
      if (!propagate(b)) continue;
      std::optional<std::vector<Rational>> lp_point;
      if (opts_.lp_relaxation) {
        auto lp = relaxation(b);
        if (lp.status == Status::UNSAT) continue;
        lp_point = std::vector<Rational>(lp.witness.begin(), lp.witness.begin() + n);
      }
      if (auto w = find_witness(b, lp_point)) {
        res.status = Status::SAT;
        res.witness = std::move(*w);
        res.note = "poly: witness after " + std::to_string(boxes) + " boxes";
        return res;
      }
      int v = widest(b);
      if (v < 0) {
        // should not happen: point boxes are decided exactly above
        undecided = true;
        continue;
      }
      auto& x = b[static_cast<std::size_t>(v)];
      Rational mid = (x.lo + x.hi) / 2;
      Box left = b, right = b;
      left[static_cast<std::size_t>(v)].hi = mid;
      left[static_cast<std::size_t>(v)].hi_open = false;
      right[static_cast<std::size_t>(v)].lo = mid;
      right[static_cast<std::size_t>(v)].lo_open = false;
      stack.push_back(std::move(right));
      stack.push_back(std::move(left));
    }
    if (undecided) {
      res.status = Status::UNKNOWN;
      res.note = "poly: undecided point box";
      return res;
    }
    res.status = Status::UNSAT;
    res.note = "poly: all " + std::to_string(boxes) + " boxes refuted";
    return res;
  }

 private:
  const IneqSystem& s_;
  PolyOptions opts_;
  std::vector<PolyTerm> normals_;
  std::vector<Monomial> nonlinear_;
  std::vector<int> in_product_;

  bool propagate(Box& b) const {
    for (int round = 0; round < 6; ++round) {
      bool changed = false;
      for (std::size_t i = 0; i < normals_.size(); ++i) {
        const PolyTerm& p = normals_[i];
        Rel rel = s_.rows[i].rel;
        if (refuted_row(range(p, b), rel)) return false;
        for (int v : p.vars()) {
          auto sp = split_on(p, v);
          if (!sp) continue;
          if (!contract_le(sp->g, sp->r, v, rel == Rel::LT, b, changed)) return false;
          if (rel == Rel::EQ && !contract_le(-sp->g, -sp->r, v, false, b, changed)) return false;
        }
      }
      if (!changed) break;
    }
    return true;
  }

  // McCormick envelopes for the product monomials plus the box as bounds.
  FeasibilityResult relaxation(const Box& b) const {
    IneqSystem r;
    r.names = s_.names;
    std::map<Monomial, int> aux;
    for (const auto& m : nonlinear_) aux[m] = r.new_var();
    auto lin = [&](const PolyTerm& p) {
      PolyTerm out;
      for (const auto& [m, c] : p.terms()) out += PolyTerm(c) * (m.size() >= 2 ? PolyTerm::var(aux.at(m)) : m.empty() ? PolyTerm(1) : PolyTerm::var(m[0]));
      return out;
    };
    for (std::size_t i = 0; i < normals_.size(); ++i) r.add(lin(normals_[i]), s_.rows[i].rel, 0);
    for (int v = 0; v < s_.num_vars(); ++v) {
      const auto& x = b[static_cast<std::size_t>(v)];
      if (x.lo_open) r.gt(PolyTerm::var(v), x.lo);
      else if (x.lo > 0) r.ge(PolyTerm::var(v), x.lo);
      if (x.hi_open) r.lt(PolyTerm::var(v), x.hi);
      else if (x.hi < 1) r.le(PolyTerm::var(v), x.hi);
    }
    for (const auto& [m, t] : aux) {
      PolyTerm T = PolyTerm::var(t);
      if (m.size() == 2) {
        int x = m[0], y = m[1];
        const auto& X = b[static_cast<std::size_t>(x)];
        const auto& Y = b[static_cast<std::size_t>(y)];
        PolyTerm vx = PolyTerm::var(x), vy = PolyTerm::var(y);
        r.ge(T, PolyTerm(X.lo) * vy + PolyTerm(Y.lo) * vx - PolyTerm(X.lo * Y.lo));
        r.ge(T, PolyTerm(X.hi) * vy + PolyTerm(Y.hi) * vx - PolyTerm(X.hi * Y.hi));
        r.le(T, PolyTerm(X.hi) * vy + PolyTerm(Y.lo) * vx - PolyTerm(X.hi * Y.lo));
        r.le(T, PolyTerm(X.lo) * vy + PolyTerm(Y.hi) * vx - PolyTerm(X.lo * Y.hi));
      } else {
        PolyTerm q(1);
        for (int v : m) q = q * PolyTerm::var(v);
        Iv range_m = range(q, b);
        r.ge(T, range_m.lo);
        r.le(T, range_m.hi);
      }
    }
    return linear_feasible(r);
  }

  bool ok(const std::vector<Rational>& w) const { return substitute_check(s_, w); }

  std::optional<std::vector<Rational>> find_witness(const Box& b, const std::optional<std::vector<Rational>>& lp) const {
    std::vector<Rational> mid(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) mid[i] = (b[i].lo + b[i].hi) / 2;
    if (ok(mid)) return mid;
    if (auto w = repair(mid, b)) return w;
    if (lp) {
      if (ok(*lp)) return *lp;
      if (auto w = fix_cover(*lp)) return w;
      if (auto w = fix_cover(mid)) return w;
    }
    return std::nullopt;
  }

  // Starting from a point, solve each failing equality for a variable that
  // occurs linearly and has not been moved yet.
  std::optional<std::vector<Rational>> repair(std::vector<Rational> w, const Box& b) const {
    std::vector<bool> moved(w.size(), false);
    for (std::size_t i = 0; i < normals_.size(); ++i) {
      if (s_.rows[i].rel != Rel::EQ) continue;
      const PolyTerm& p = normals_[i];
      if (p.eval(w) == 0) continue;
      for (int v : p.vars()) {
        if (moved[static_cast<std::size_t>(v)]) continue;
        auto sp = split_on(p, v);
        if (!sp) continue;
        Rational g = sp->g.eval(w);
        if (g == 0) continue;
        Rational val = -sp->r.eval(w) / g;
        const auto& x = b[static_cast<std::size_t>(v)];
        if (val < x.lo || val > x.hi) continue;
        w[static_cast<std::size_t>(v)] = val;
        moved[static_cast<std::size_t>(v)] = true;
        break;
      }
    }
    if (ok(w)) return w;
    return std::nullopt;
  }

  // Fix enough variables at `at` to make the system linear, then solve exactly.
  std::optional<std::vector<Rational>> fix_cover(const std::vector<Rational>& at) const {
    std::map<int, Rational> fixed;
    auto open_count = [&](const Monomial& m) {
      return std::count_if(m.begin(), m.end(), [&](int v) { return !fixed.count(v); });
    };
    while (true) {
      std::map<int, int> score;
      for (const auto& m : nonlinear_)
        if (open_count(m) >= 2)
          for (int v : m)
            if (!fixed.count(v)) ++score[v];
      if (score.empty()) break;
      int best = std::max_element(score.begin(), score.end(), [](const auto& a, const auto& c) { return a.second < c.second; })->first;
      fixed[best] = at[static_cast<std::size_t>(best)];
    }
    IneqSystem rest = substitute(s_, fixed);
    auto lin = linear_feasible(rest);
    if (lin.status != Status::SAT) return std::nullopt;
    std::vector<Rational> w = lin.witness;
    for (const auto& [v, q] : fixed) w[static_cast<std::size_t>(v)] = q;
    if (ok(w)) return w;
    return std::nullopt;
  }

  int widest(const Box& b) const {
    std::vector<int> all;
    const std::vector<int>* cands = &in_product_;
    if (!opts_.lp_relaxation || in_product_.empty()) {
      for (int v = 0; v < static_cast<int>(b.size()); ++v) all.push_back(v);
      cands = &all;
    }
    int best = -1;
    Rational wbest = 0;
    for (int v : *cands) {
      Rational w = b[static_cast<std::size_t>(v)].hi - b[static_cast<std::size_t>(v)].lo;
      if (w > wbest) {
        wbest = w;
        best = v;
      }
    }
    return best;
  }
};

}  // namespace

namespace {

// p with v replaced by sub.
PolyTerm compose(const PolyTerm& p, int v, const PolyTerm& sub) {
  PolyTerm out;
  for (const auto& [m, c] : p.terms()) {
    PolyTerm t(c);
    for (int u : m) t = t * (u == v ? sub : PolyTerm::var(u));
    out += t;
  }
  return out;
}

struct Elimination {
  int v;
  PolyTerm value;
};

// Finds an equality c*v + r = 0 with c constant and v not in r, removes it,
// and replaces v by -r/c elsewhere; v's own bounds become rows. Interval
// reasoning loses the link between v and r, so this catches systems that are
// only refuted in the limit of a box search.
bool eliminate_one(IneqSystem& s, std::vector<Elimination>& out) {
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    if (s.rows[i].rel != Rel::EQ) continue;
    PolyTerm p = s.rows[i].normal();
    for (int v : p.vars()) {
      auto sp = split_on(p, v);
      if (!sp || !sp->g.is_constant()) continue;
      PolyTerm value = sp->r * PolyTerm(-1 / sp->g.constant());
      if (value.degree() > 2) continue;
      s.rows.erase(s.rows.begin() + static_cast<std::ptrdiff_t>(i));
      for (auto& row : s.rows) row = Ineq{compose(row.normal(), v, value), row.rel, PolyTerm(0)};
      s.ge(value, 0);
      s.le(value, 1);
      out.push_back({v, value});
      return true;
    }
  }
  return false;
}

// p <= 0 together with -p <= 0 becomes p = 0.
IneqSystem merge_equalities(const IneqSystem& s) {
  IneqSystem t;
  t.names = s.names;
  std::map<std::map<Monomial, Rational>, std::size_t> le;
  for (const auto& row : s.rows) {
    PolyTerm p = row.normal();
    if (row.rel == Rel::LE) {
      auto it = le.find((-p).terms());
      if (it != le.end()) {
        t.rows[it->second].rel = Rel::EQ;
        le.erase(it);
        continue;
      }
      le.emplace(p.terms(), t.rows.size());
    }
    t.rows.push_back(Ineq{p, row.rel, PolyTerm(0)});
  }
  return t;
}

}  // namespace

FeasibilityResult poly_feasible(const IneqSystem& s, const PolyOptions& opts) {
  IneqSystem t = merge_equalities(s);
  std::vector<Elimination> elim;
  while (eliminate_one(t, elim)) {}
  if (elim.empty()) return Solver(s, opts).run();
  FeasibilityResult r = Solver(t, opts).run();
  r.note += "; " + std::to_string(elim.size()) + " variables eliminated";
  if (r.status != Status::SAT) return r;
  for (auto it = elim.rbegin(); it != elim.rend(); ++it) r.witness[static_cast<std::size_t>(it->v)] = it->value.eval(r.witness);
  if (!substitute_check(s, r.witness)) throw std::logic_error("poly witness failed the substitution check");
  return r;
}

FeasibilityResult feasible(const IneqSystem& s, std::size_t budget) {
  if (s.is_linear()) return linear_feasible(s);
  PolyOptions o;
  o.budget = budget;
  return poly_feasible(s, o);
}

}  // namespace eapr
