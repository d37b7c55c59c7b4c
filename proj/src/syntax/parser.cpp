#include "eapr/syntax.hpp"

#include <cctype>

namespace eapr {

namespace {

enum class Tok {
  LParen, RParen, Odot, Arrow, PArrow, Biimp, Plus, Star, Amp, Bang, Tilde, Delta,
  Knows, KDiam, Box, Diam, Pr, Half, Zero, One, Const, Var, End
};

struct Token {
  Tok t;
  std::size_t pos;  // 1-based column
  std::string text;
  Rational q;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Odot: return "'(.)'";
    case Tok::Arrow: return "'->'";
    case Tok::PArrow: return "'=>'";
    case Tok::Biimp: return "'<->'";
    case Tok::Plus: return "'+'";
    case Tok::Star: return "'*'";
    case Tok::Amp: return "'&'";
    case Tok::Bang: return "'!'";
    case Tok::Tilde: return "'~'";
    case Tok::Delta: return "'D'";
    case Tok::Knows: return "K_";
    case Tok::KDiam: return "Kd_";
    case Tok::Box: return "box";
    case Tok::Diam: return "diamond";
    case Tok::Pr: return "Pr_";
    case Tok::Half: return "'1/2'";
    case Tok::Zero: return "'0'";
    case Tok::One: return "'1'";
    case Tok::Const: return "constant";
    case Tok::Var: return "variable";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto err = [&](std::size_t at, const std::string& m) { throw ParseError(at + 1, m); };
  auto starts = [&](std::string_view p) { return s.substr(i, p.size()) == p; };
  auto agent_at = [&](std::size_t j) {
    std::size_t k = j;
    while (k < s.size() && ident_char(s[k])) ++k;
    if (k == j) err(j, "expected agent name");
    return k;
  };
  while (true) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::size_t st = i;
    char c = s[i];
    Token tk{Tok::End, st + 1, {}, {}};
    if (starts("(.)")) {
      tk.t = Tok::Odot;
      i += 3;
    } else if (c == '(') {
      tk.t = Tok::LParen;
      ++i;
    } else if (c == ')') {
      tk.t = Tok::RParen;
      ++i;
    } else if (starts("->")) {
      tk.t = Tok::Arrow;
      i += 2;
    } else if (starts("=>")) {
      tk.t = Tok::PArrow;
      i += 2;
    } else if (starts("<->")) {
      tk.t = Tok::Biimp;
      i += 3;
    } else if (c == '+') {
      tk.t = Tok::Plus;
      ++i;
    } else if (c == '*') {
      tk.t = Tok::Star;
      ++i;
    } else if (c == '&') {
      tk.t = Tok::Amp;
      ++i;
    } else if (c == '!') {
      tk.t = Tok::Bang;
      ++i;
    } else if (c == '~') {
      tk.t = Tok::Tilde;
      ++i;
    } else if (c == '[' || c == '<') {
      char close = c == '[' ? ']' : '>';
      std::size_t j = i + 1;
      while (j < s.size() && (ident_char(s[j]) || s[j] == '_')) ++j;
      if (j == i + 1) err(i + 1, "expected action name");
      if (j >= s.size() || s[j] != close) err(j, std::string("expected '") + close + "'");
      tk.t = c == '[' ? Tok::Box : Tok::Diam;
      tk.text = std::string(s.substr(i + 1, j - i - 1));
      i = j + 1;
    } else if (starts("Kd_")) {
      std::size_t k = agent_at(i + 3);
      tk.t = Tok::KDiam;
      tk.text = std::string(s.substr(i + 3, k - i - 3));
      i = k;
    } else if (starts("K_")) {
      std::size_t k = agent_at(i + 2);
      tk.t = Tok::Knows;
      tk.text = std::string(s.substr(i + 2, k - i - 2));
      i = k;
    } else if (starts("Pr_")) {
      std::size_t k = agent_at(i + 3);
      tk.t = Tok::Pr;
      tk.text = std::string(s.substr(i + 3, k - i - 3));
      i = k;
    } else if (c == 'D') {
      tk.t = Tok::Delta;
      ++i;
    } else if (starts("1/2")) {
      tk.t = Tok::Half;
      i += 3;
    } else if (c == '0' || c == '1') {
      tk.t = c == '0' ? Tok::Zero : Tok::One;
      ++i;
      if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) err(st, "unexpected number");
    } else if (starts("c(")) {
      std::size_t j = i + 2;
      while (j < s.size() && s[j] != ')') ++j;
      if (j >= s.size()) err(j, "expected ')' after constant");
      try {
        tk.q = parse_rational(s.substr(i + 2, j - i - 2));
      } catch (const std::invalid_argument& e) {
        err(i + 2, e.what());
      }
      if (tk.q < 0 || tk.q > 1) err(i + 2, "constant outside [0,1]");
      tk.t = Tok::Const;
      i = j + 1;
    } else if (c >= 'a' && c <= 'z') {
      std::size_t j = i + 1;
      while (j < s.size() && (ident_char(s[j]) || s[j] == '_')) ++j;
      tk.t = Tok::Var;
      tk.text = std::string(s.substr(i, j - i));
      i = j;
    } else {
      err(i, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(tk));
  }
  out.push_back(Token{Tok::End, s.size() + 1, {}, {}});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, Layer layer) : toks_(lex(text)), layer_(layer) {}

  Event event_top() {
    Event e = ev_and();
    expect_end();
    return e;
  }

  Formula formula_top() {
    Formula f = arrow();
    expect_end();
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t k_ = 0;
  Layer layer_;

  const Token& peek() const { return toks_[k_]; }
  const Token& next() { return toks_[k_++]; }
  [[noreturn]] void fail(const Token& t, const std::string& m) const { throw ParseError(t.pos, m); }
  void expect(Tok t) {
    if (peek().t != t) fail(peek(), std::string("expected ") + describe(t) + ", found " + describe(peek().t));
    ++k_;
  }
  void expect_end() {
    if (peek().t != Tok::End) fail(peek(), std::string("unexpected ") + describe(peek().t));
  }

  // ---- event layer: '&' binds tighter than nothing else; unary prefixes bind tightest.
  Event ev_and() {
    Event e = ev_unary();
    while (peek().t == Tok::Amp) {
      next();
      e = Event::conj(e, ev_unary());
    }
    if (peek().t != Tok::End && peek().t != Tok::RParen)
      fail(peek(), std::string(describe(peek().t)) + " is not allowed in event formulas");
    return e;
  }

  Event ev_unary() {
    const Token& t = next();
    switch (t.t) {
      case Tok::Tilde: return Event::neg(ev_unary());
      case Tok::Knows: return Event::knows(t.text, ev_unary());
      case Tok::KDiam: return Event::kdiamond(t.text, ev_unary());
      case Tok::Box: return Event::box(t.text, ev_unary());
      case Tok::Diam: return Event::diamond(t.text, ev_unary());
      case Tok::Var: return Event::var(t.text);
      case Tok::LParen: {
        Event e = ev_and();
        expect(Tok::RParen);
        return e;
      }
      case Tok::End: fail(t, "unexpected end of input");
      default: fail(t, std::string(describe(t.t)) + " is not allowed in event formulas");
    }
  }

  // ---- prob / mod layers
  Formula arrow() {
    Formula lhs = plus();
    Tok t = peek().t;
    if (t == Tok::Arrow || t == Tok::PArrow || t == Tok::Biimp) {
      next();
      Formula rhs = arrow();
      if (t == Tok::Arrow) return Formula::imp(lhs, rhs);
      if (t == Tok::PArrow) return Formula::pimp(lhs, rhs);
      return Formula::biimp(lhs, rhs);
    }
    return lhs;
  }

  Formula plus() {
    Formula f = mul();
    while (peek().t == Tok::Plus) {
      next();
      f = Formula::oplus(f, mul());
    }
    return f;
  }

  Formula mul() {
    Formula f = unary();
    while (true) {
      Tok t = peek().t;
      if (t == Tok::Star) {
        next();
        f = Formula::prod(f, unary());
      } else if (t == Tok::Odot) {
        next();
        f = Formula::odot(f, unary());
      } else if (t == Tok::Amp) {
        fail(peek(), "'&' is classical; use '(.)' or '*' outside event formulas");
      } else {
        return f;
      }
    }
  }

  Formula unary() {
    const Token& t = next();
    switch (t.t) {
      case Tok::Bang: return Formula::neg(unary());
      case Tok::Delta: return Formula::delta(unary());
      case Tok::Knows: return Formula::knows(t.text, unary());
      case Tok::KDiam: return Formula::kdiamond(t.text, unary());
      case Tok::Box: return Formula::box(t.text, unary());
      case Tok::Diam: return Formula::diamond(t.text, unary());
      case Tok::Half: return Formula::half();
      case Tok::Zero: return Formula::zero();
      case Tok::One: return Formula::one();
      case Tok::Const: return Formula::constant(t.q);
      case Tok::Tilde: fail(t, "'~' is classical negation; use '!' outside event formulas");
      case Tok::Var:
        if (layer_ == Layer::Prob) fail(t, "bare variable '" + t.text + "' in a probabilistic formula; wrap it in Pr_A(...)");
        return Formula::var(t.text);
      case Tok::Pr: {
        if (layer_ == Layer::Mod) fail(t, "Pr_ is not allowed in modal formulas");
        expect(Tok::LParen);
        Event e = ev_and();
        expect(Tok::RParen);
        return Formula::pr(t.text, e);
      }
      case Tok::LParen: {
        Formula f = arrow();
        expect(Tok::RParen);
        return f;
      }
      case Tok::End: fail(t, "unexpected end of input");
      default: fail(t, std::string("unexpected ") + describe(t.t));
    }
  }
};

}  // namespace

Event parse_event(std::string_view text) { return Parser(text, Layer::Event).event_top(); }
Formula parse_prob(std::string_view text) { return Parser(text, Layer::Prob).formula_top(); }
Formula parse_mod(std::string_view text) { return Parser(text, Layer::Mod).formula_top(); }

Formula parse_formula(std::string_view text, Layer layer) {
  if (layer == Layer::Event) throw std::invalid_argument("use parse_event for the event layer");
  return Parser(text, layer).formula_top();
}

}  // namespace eapr
