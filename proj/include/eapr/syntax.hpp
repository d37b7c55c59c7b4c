#pragma once

#include "eapr/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eapr {

struct NodeFactory;

// Classical event formulas: p | ~a | a & b | K_A a | [x]a.
class Event {
 public:
  enum class Kind : std::uint8_t { Var, Not, And, Knows, Box };

  Event() = default;

  static Event var(std::string p);
  static Event neg(const Event& a);
  static Event conj(const Event& a, const Event& b);
  static Event knows(std::string agent, const Event& a);
  static Event box(std::string action, const Event& a);
  static Event diamond(std::string action, const Event& a);  // ~[x]~a
  static Event kdiamond(std::string agent, const Event& a);  // ~K_A~a

  bool valid() const { return n_ != nullptr; }
  Kind kind() const;
  const std::string& name() const;  // variable, agent or action
  const Event& arg() const;         // operand of Not/Knows/Box, left of And
  const Event& rhs() const;         // right of And
  std::size_t hash() const;

  friend bool operator==(const Event& a, const Event& b);
  friend bool operator!=(const Event& a, const Event& b) { return !(a == b); }
  friend bool operator<(const Event& a, const Event& b) { return compare(a, b) < 0; }
  static int compare(const Event& a, const Event& b);

public:
  struct Node;

 private:
  friend struct NodeFactory;
  std::shared_ptr<const Node> n_;
  explicit Event(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
};

// Outer formulas. One type serves the probabilistic layer (Pr atoms) and the
// pure modal layer (Var atoms); the parser enforces which atoms may appear.
class Formula {
 public:
  enum class Kind : std::uint8_t { Var, Pr, Neg, Imp, Prod, PImp, Const, Knows, Box };

  Formula() = default;

  static Formula var(std::string p);
  static Formula pr(std::string agent, const Event& a);
  static Formula neg(const Formula& a);
  static Formula imp(const Formula& a, const Formula& b);
  static Formula prod(const Formula& a, const Formula& b);
  static Formula pimp(const Formula& a, const Formula& b);
  static Formula constant(const Rational& q);
  static Formula half();
  static Formula knows(std::string agent, const Formula& a);
  static Formula box(std::string action, const Formula& a);

  // Derived connectives, expanded into the primitives above.
  static Formula one();                                       // 1/2 -> 1/2
  static Formula zero();                                      // !one
  static Formula oplus(const Formula& a, const Formula& b);   // !a -> b
  static Formula odot(const Formula& a, const Formula& b);    // !(a -> !b)
  static Formula delta(const Formula& a);                     // !a => zero
  static Formula diamond(std::string action, const Formula& a);
  static Formula kdiamond(std::string agent, const Formula& a);
  static Formula biimp(const Formula& a, const Formula& b);   // (a->b) (.) (b->a)
  // k/2^m built from half with prod and oplus; throws for non-dyadic q.
  static Formula dyadic(const Rational& q);

  bool valid() const { return n_ != nullptr; }
  Kind kind() const;
  const std::string& name() const;  // variable, agent or action
  const Formula& arg() const;       // unary operand or left operand
  const Formula& rhs() const;       // right operand
  const Event& event() const;       // Pr operand
  const Rational& value() const;    // Const
  std::size_t hash() const;
  bool is_atom() const { return kind() == Kind::Var || kind() == Kind::Pr; }

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  friend bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }
  static int compare(const Formula& a, const Formula& b);

public:
  struct Node;

 private:
  friend struct NodeFactory;
  std::shared_ptr<const Node> n_;
  explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
};

struct EventHash {
  std::size_t operator()(const Event& e) const { return e.hash(); }
};
struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

enum class Connective { One, Zero, Oplus, Odot, Delta, Diamond, KDiamond, Rational };

// Name-driven construction of derived connectives. `label` is the action or
// agent for Diamond/KDiamond, `q` the value for Rational.
Formula desugar(Connective c, const std::vector<Formula>& args, const std::string& label = {},
                const Rational& q = Rational(0));

enum class Layer { Event, Prob, Mod };

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& msg);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

Event parse_event(std::string_view text);
Formula parse_prob(std::string_view text);
Formula parse_mod(std::string_view text);
Formula parse_formula(std::string_view text, Layer layer);

std::string to_string(const Event& e);
std::string to_string(const Formula& f);

// AST nodes plus one per agent/action annotation. A Pr node counts its own
// node, its agent and the nodes of the wrapped event.
std::size_t size(const Event& e);
std::size_t size(const Formula& f);

std::size_t modal_depth(const Event& e);
std::size_t modal_depth(const Formula& f);  // outer modalities only

// Distinct subformulas, children before parents.
std::vector<Event> subformulas(const Event& e);
std::vector<Formula> subformulas(const Formula& f);

// SF~: subformulas together with their classical negations, deduplicated.
std::vector<Event> closure_neg(const Event& e);

std::set<std::string> agents_of(const Formula& f);   // outer K and Pr agents
std::set<std::string> actions_of(const Formula& f);  // outer actions
std::set<std::string> variables_of(const Formula& f);
std::set<std::string> agents_of(const Event& e);
std::set<std::string> actions_of(const Event& e);
std::set<std::string> variables_of(const Event& e);
std::vector<std::pair<std::string, Event>> pr_atoms(const Formula& f);

bool has_pr(const Formula& f);
bool has_var(const Formula& f);
bool uses_product(const Formula& f);  // prod or pimp anywhere
bool is_ground(const Formula& f);     // no atoms and no modalities

}  // namespace eapr
