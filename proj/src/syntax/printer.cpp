#include "eapr/syntax.hpp"

namespace eapr {

namespace {

// Binding levels, loosest first.
constexpr int kArrow = 1, kPlus = 2, kMul = 3, kUnary = 4;

bool is_half(const Formula& f) { return f.kind() == Formula::Kind::Const && f.value() == Rational(1, 2); }

bool is_one(const Formula& f) {
  return f.kind() == Formula::Kind::Imp && is_half(f.arg()) && is_half(f.rhs());
}

bool is_zero(const Formula& f) { return f.kind() == Formula::Kind::Neg && is_one(f.arg()); }

std::string paren(std::string s, bool wrap) { return wrap ? "(" + s + ")" : s; }

std::string ev(const Event& e, int ctx) {
  using K = Event::Kind;
  switch (e.kind()) {
    case K::Var: return e.name();
    case K::And: return paren(ev(e.arg(), kMul) + " & " + ev(e.rhs(), kUnary), ctx > kMul);
    case K::Knows: return "K_" + e.name() + " " + ev(e.arg(), kUnary);
    case K::Box: return "[" + e.name() + "]" + ev(e.arg(), kUnary);
    case K::Not: {
      const Event& a = e.arg();
      if (a.kind() == K::Box && a.arg().kind() == K::Not) return "<" + a.name() + ">" + ev(a.arg().arg(), kUnary);
      if (a.kind() == K::Knows && a.arg().kind() == K::Not)
        return "Kd_" + a.name() + " " + ev(a.arg().arg(), kUnary);
      return "~" + ev(a, kUnary);
    }
  }
  return "?";
}

std::string fm(const Formula& f, int ctx) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Var: return f.name();
    case K::Pr: return "Pr_" + f.name() + "(" + ev(f.event(), 0) + ")";
    case K::Const: return is_half(f) ? "1/2" : "c(" + to_string(f.value(), true) + ")";
    case K::Knows: return "K_" + f.name() + " " + fm(f.arg(), kUnary);
    case K::Box: return "[" + f.name() + "]" + fm(f.arg(), kUnary);
    case K::Prod: return paren(fm(f.arg(), kMul) + " * " + fm(f.rhs(), kUnary), ctx > kMul);
    case K::PImp:
      if (f.arg().kind() == K::Neg && is_zero(f.rhs())) return "D " + fm(f.arg().arg(), kUnary);
      return paren(fm(f.arg(), kPlus) + " => " + fm(f.rhs(), kArrow), ctx > kArrow);
    case K::Imp:
      if (is_one(f)) return "1";
      if (f.arg().kind() == K::Neg)
        return paren(fm(f.arg().arg(), kPlus) + " + " + fm(f.rhs(), kMul), ctx > kPlus);
      return paren(fm(f.arg(), kPlus) + " -> " + fm(f.rhs(), kArrow), ctx > kArrow);
    case K::Neg: {
      const Formula& a = f.arg();
      if (is_zero(f)) return "0";
      if (a.kind() == K::Box && a.arg().kind() == K::Neg) return "<" + a.name() + ">" + fm(a.arg().arg(), kUnary);
      if (a.kind() == K::Knows && a.arg().kind() == K::Neg)
        return "Kd_" + a.name() + " " + fm(a.arg().arg(), kUnary);
      if (a.kind() == K::Imp && a.rhs().kind() == K::Neg)
        return paren(fm(a.arg(), kMul) + " (.) " + fm(a.rhs().arg(), kUnary), ctx > kMul);
      return "!" + fm(a, kUnary);
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const Event& e) { return ev(e, 0); }
std::string to_string(const Formula& f) { return fm(f, 0); }

}  // namespace eapr
