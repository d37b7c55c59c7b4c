// General simplex in the Dutertre/de Moura style: every row with two or more
// variables gets a slack, bounds live on variables, and strict bounds use
// values of the form c + k*eps with eps a positive infinitesimal.
#include "eapr/constraints.hpp"

#include <optional>
#include <stdexcept>

namespace eapr {

namespace {

struct DR {
  Rational c, k;  // c + k*eps
  DR() = default;
  DR(Rational c_, Rational k_ = 0) : c(std::move(c_)), k(std::move(k_)) {}
  friend DR operator+(const DR& a, const DR& b) { return {a.c + b.c, a.k + b.k}; }
  friend DR operator-(const DR& a, const DR& b) { return {a.c - b.c, a.k - b.k}; }
  friend DR operator*(const Rational& s, const DR& a) { return {s * a.c, s * a.k}; }
  friend bool operator<(const DR& a, const DR& b) { return a.c < b.c || (a.c == b.c && a.k < b.k); }
  friend bool operator>(const DR& a, const DR& b) { return b < a; }
  friend bool operator<=(const DR& a, const DR& b) { return !(b < a); }
};

class Simplex {
 public:
  explicit Simplex(int n) : n_(n) {
    for (int i = 0; i < n; ++i) add_column(DR(0), DR(1));
  }

  // Returns false when the bound is immediately inconsistent.
  bool tighten_lower(int v, const DR& b) {
    auto& lo = lower_[static_cast<std::size_t>(v)];
    if (!lo || *lo < b) lo = b;
    return !(upper_[static_cast<std::size_t>(v)] && *upper_[static_cast<std::size_t>(v)] < *lo);
  }
  bool tighten_upper(int v, const DR& b) {
    auto& up = upper_[static_cast<std::size_t>(v)];
    if (!up || b < *up) up = b;
    return !(lower_[static_cast<std::size_t>(v)] && *up < *lower_[static_cast<std::size_t>(v)]);
  }

  // Adds s = sum coef*x as a new basic variable; returns its id.
  int add_slack(const std::map<int, Rational>& coef) {
    int s = add_column(std::nullopt, std::nullopt);
    std::vector<Rational> row(static_cast<std::size_t>(cols_));
    for (const auto& [v, a] : coef) row[static_cast<std::size_t>(v)] = a;
    rows_.push_back(std::move(row));
    basic_.push_back(s);
    row_of_[static_cast<std::size_t>(s)] = static_cast<int>(rows_.size()) - 1;
    for (auto& r : rows_) r.resize(static_cast<std::size_t>(cols_));
    return s;
  }

  bool solve(std::size_t& pivots) {
    // nonbasic columns start at a bound; slacks follow from them
    for (int v = 0; v < cols_; ++v) {
      if (row_of_[static_cast<std::size_t>(v)] >= 0) continue;
      auto& val = beta_[static_cast<std::size_t>(v)];
      if (lower_[static_cast<std::size_t>(v)]) val = *lower_[static_cast<std::size_t>(v)];
      else if (upper_[static_cast<std::size_t>(v)]) val = *upper_[static_cast<std::size_t>(v)];
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) recompute(r);

    while (true) {
      int bad = -1;
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        int b = basic_[r];
        if (violated(b) && (bad < 0 || b < bad)) bad = b;
      }
      if (bad < 0) return true;
      auto r = static_cast<std::size_t>(row_of_[static_cast<std::size_t>(bad)]);
      bool raise = lower_[static_cast<std::size_t>(bad)] && beta_[static_cast<std::size_t>(bad)] < *lower_[static_cast<std::size_t>(bad)];
      int entering = -1;
      for (int j = 0; j < cols_; ++j) {
        if (row_of_[static_cast<std::size_t>(j)] >= 0) continue;
        const Rational& a = rows_[r][static_cast<std::size_t>(j)];
        if (a == 0) continue;
        bool up = (a > 0) == raise;  // direction x_j must move
        if (up ? can_increase(j) : can_decrease(j)) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return false;
      DR target = raise ? *lower_[static_cast<std::size_t>(bad)] : *upper_[static_cast<std::size_t>(bad)];
      pivot_and_update(r, entering, target);
      ++pivots;
    }
  }

  // Picks a concrete eps that keeps every bound, then returns the first n_ values.
  std::vector<Rational> witness() const {
    Rational eps = 1;
    for (int v = 0; v < cols_; ++v) {
      const DR& x = beta_[static_cast<std::size_t>(v)];
      if (const auto& lo = lower_[static_cast<std::size_t>(v)]; lo && x.c > lo->c && x.k < lo->k)
        eps = min_q(eps, (x.c - lo->c) / (lo->k - x.k));
      if (const auto& up = upper_[static_cast<std::size_t>(v)]; up && x.c < up->c && x.k > up->k)
        eps = min_q(eps, (up->c - x.c) / (x.k - up->k));
    }
    eps /= 2;
    std::vector<Rational> out(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) out[static_cast<std::size_t>(v)] = beta_[static_cast<std::size_t>(v)].c + beta_[static_cast<std::size_t>(v)].k * eps;
    return out;
  }

 private:
  int n_;
  int cols_ = 0;
  std::vector<std::optional<DR>> lower_, upper_;
  std::vector<DR> beta_;
  std::vector<int> row_of_;
  std::vector<std::vector<Rational>> rows_;  // basic = sum rows_[r][j] * x_j over nonbasic j
  std::vector<int> basic_;

  int add_column(std::optional<DR> lo, std::optional<DR> up) {
    lower_.push_back(std::move(lo));
    upper_.push_back(std::move(up));
    beta_.emplace_back();
    row_of_.push_back(-1);
    return cols_++;
  }

  void recompute(std::size_t r) {
    DR s;
    for (int j = 0; j < cols_; ++j) {
      const Rational& a = rows_[r][static_cast<std::size_t>(j)];
      if (a != 0) s = s + a * beta_[static_cast<std::size_t>(j)];
    }
    beta_[static_cast<std::size_t>(basic_[r])] = s;
  }

  bool violated(int v) const {
    const DR& x = beta_[static_cast<std::size_t>(v)];
    if (lower_[static_cast<std::size_t>(v)] && x < *lower_[static_cast<std::size_t>(v)]) return true;
    if (upper_[static_cast<std::size_t>(v)] && x > *upper_[static_cast<std::size_t>(v)]) return true;
    return false;
  }
  bool can_increase(int v) const {
    return !upper_[static_cast<std::size_t>(v)] || beta_[static_cast<std::size_t>(v)] < *upper_[static_cast<std::size_t>(v)];
  }
  bool can_decrease(int v) const {
    return !lower_[static_cast<std::size_t>(v)] || beta_[static_cast<std::size_t>(v)] > *lower_[static_cast<std::size_t>(v)];
  }

  void pivot_and_update(std::size_t r, int j, const DR& target) {
    int i = basic_[r];
    const Rational a = rows_[r][static_cast<std::size_t>(j)];
    DR theta = Rational(1 / a) * (target - beta_[static_cast<std::size_t>(i)]);
    beta_[static_cast<std::size_t>(i)] = target;
    beta_[static_cast<std::size_t>(j)] = beta_[static_cast<std::size_t>(j)] + theta;
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      if (k == r) continue;
      const Rational& c = rows_[k][static_cast<std::size_t>(j)];
      if (c != 0) beta_[static_cast<std::size_t>(basic_[k])] = beta_[static_cast<std::size_t>(basic_[k])] + c * theta;
    }
    // x_j = (x_i - sum_{k != j} a_k x_k) / a
    auto& row = rows_[r];
    Rational inv = 1 / a;
    for (int k = 0; k < cols_; ++k) {
      if (k == j) continue;
      auto& e = row[static_cast<std::size_t>(k)];
      if (e != 0) e = -e * inv;
    }
    row[static_cast<std::size_t>(j)] = 0;
    row[static_cast<std::size_t>(i)] = inv;
    basic_[r] = j;
    row_of_[static_cast<std::size_t>(j)] = static_cast<int>(r);
    row_of_[static_cast<std::size_t>(i)] = -1;
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      if (k == r) continue;
      Rational c = rows_[k][static_cast<std::size_t>(j)];
      if (c == 0) continue;
      auto& other = rows_[k];
      other[static_cast<std::size_t>(j)] = 0;
      for (int m = 0; m < cols_; ++m) {
        const Rational& e = row[static_cast<std::size_t>(m)];
        if (e != 0) other[static_cast<std::size_t>(m)] += c * e;
      }
    }
  }
};

}  // namespace

FeasibilityResult linear_feasible(const IneqSystem& s) {
  if (!s.is_linear()) throw std::invalid_argument("linear_feasible called on a nonlinear system");
  FeasibilityResult res;
  int n = s.num_vars();
  Simplex lp(n);
  std::map<std::map<int, Rational>, int> slack_of;  // scaled linear form -> slack id
  for (const auto& row : s.rows) {
    PolyTerm p = row.normal();
    Rational c = p.constant();
    std::map<int, Rational> lin;
    for (const auto& [m, a] : p.terms())
      if (!m.empty()) lin[m[0]] = a;
    Rational eps = row.rel == Rel::LT ? Rational(-1) : Rational(0);
    if (lin.empty()) {
      bool ok = row.rel == Rel::LE ? c <= 0 : row.rel == Rel::LT ? c < 0 : c == 0;
      if (!ok) {
        res.status = Status::UNSAT;
        res.note = "simplex: constant row";
        return res;
      }
      continue;
    }
    // scale so the first coefficient is +-1; sign is kept so directions hold
    Rational scale = lin.begin()->second;
    if (scale < 0) scale = -scale;
    for (auto& [v, a] : lin) a /= scale;
    c /= scale;
    int target;
    Rational coef;
    if (lin.size() == 1) {
      target = lin.begin()->first;
      coef = lin.begin()->second;  // +-1
    } else {
      auto it = slack_of.find(lin);
      target = it != slack_of.end() ? it->second : (slack_of[lin] = lp.add_slack(lin));
      coef = 1;
    }
    // coef*t + c rel 0
    DR bound = coef > 0 ? DR(-c, eps) : DR(c, -eps);
    bool ok = true;
    if (row.rel == Rel::EQ) ok = lp.tighten_lower(target, DR(-c / coef)) && lp.tighten_upper(target, DR(-c / coef));
    else if (coef > 0) ok = lp.tighten_upper(target, bound);
    else ok = lp.tighten_lower(target, bound);
    if (!ok) {
      res.status = Status::UNSAT;
      res.note = "simplex: conflicting bounds";
      return res;
    }
  }
  std::size_t pivots = 0;
  if (!lp.solve(pivots)) {
    res.status = Status::UNSAT;
    res.note = "simplex: infeasible row after " + std::to_string(pivots) + " pivots";
    return res;
  }
  res.witness = lp.witness();
  if (!substitute_check(s, res.witness)) throw std::logic_error("simplex witness failed the substitution check");
  res.status = Status::SAT;
  res.note = "simplex: feasible after " + std::to_string(pivots) + " pivots";
  return res;
}

}  // namespace eapr
