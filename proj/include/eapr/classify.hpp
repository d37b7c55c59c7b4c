#pragma once

#include "eapr/syntax.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eapr {

enum class FragmentTag { UML_box, UML_diamond, UPL_box, UPL_diamond, UPR_rule, EPR_rule, UPL_set_member, none };

const char* tag_name(FragmentTag t);

struct FragmentClass {
  FragmentTag tag = FragmentTag::none;
  bool proper = false;  // at least one (outer) modality
};

struct Modality {
  bool knows = false;  // K_A / Kd_A when true, [a] / <a> otherwise
  std::string label;
  bool operator==(const Modality&) const = default;
};

enum class Chain { None, Box, Diamond };

// A uniform literal: a chain of same-polarity modalities over Pr_A(lambda)
// or over a variable, possibly negated at the bottom.
struct Literal {
  Chain chain = Chain::None;
  std::vector<Modality> prefix;
  bool negated = false;
  bool prob = true;  // Pr atom at the bottom, else a variable
  std::string agent;
  Event event;
  std::string var;

  bool proper() const { return !prefix.empty(); }
  bool is_box() const { return chain != Chain::Diamond; }      // propositional counts as both
  bool is_diamond() const { return chain != Chain::Box; }
  Literal negation() const;  // dual chain, flipped bottom
  Formula to_formula() const;
  bool operator==(const Literal& o) const { return to_formula() == o.to_formula(); }
};

// Recognizes a uniform literal after pushing negations through the modalities.
// For Pr atoms the wrapped event must be a negation-free uniform event literal.
std::optional<Literal> as_literal(const Formula& f);

// Same shape on the event layer; `negated` marks a negated variable.
struct EventLiteral {
  Chain chain = Chain::None;
  std::vector<Modality> prefix;
  bool negated = false;
  std::string var;
};
std::optional<EventLiteral> as_event_literal(const Event& e);

// body_1 (.) ... (.) body_n -> head, with head empty meaning 0.
struct Rule {
  std::vector<Literal> body;
  std::optional<Literal> head;
};

// Accepts rule arrows, curried arrows and the equivalent (+)-clause forms.
std::optional<Rule> as_rule(const Formula& f);

bool is_upr_rule(const Rule& r);
bool is_epr_rule(const Rule& r);

FragmentClass classify(const Formula& f);

enum class TheoryKind { UPR, EPR, Neither };
const char* theory_kind_name(TheoryKind k);
TheoryKind classify_theory(const std::vector<Formula>& theory);

}  // namespace eapr
