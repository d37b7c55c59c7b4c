#include "eapr/classify.hpp"

namespace eapr {

const char* tag_name(FragmentTag t) {
  switch (t) {
    case FragmentTag::UML_box: return "UML_box";
    case FragmentTag::UML_diamond: return "UML_diamond";
    case FragmentTag::UPL_box: return "UPL_box";
    case FragmentTag::UPL_diamond: return "UPL_diamond";
    case FragmentTag::UPR_rule: return "UPR_rule";
    case FragmentTag::EPR_rule: return "EPR_rule";
    case FragmentTag::UPL_set_member: return "UPL_set_member";
    case FragmentTag::none: return "none";
  }
  return "none";
}

const char* theory_kind_name(TheoryKind k) {
  switch (k) {
    case TheoryKind::UPR: return "UPR";
    case TheoryKind::EPR: return "EPR+";
    case TheoryKind::Neither: return "neither";
  }
  return "neither";
}

namespace {

bool is_half(const Formula& f) { return f.kind() == Formula::Kind::Const && f.value() == Rational(1, 2); }
bool is_one(const Formula& f) {
  return f.kind() == Formula::Kind::Imp && is_half(f.arg()) && is_half(f.rhs());
}
bool is_zero(const Formula& f) {
  if (f.kind() == Formula::Kind::Const) return f.value() == 0;
  return f.kind() == Formula::Kind::Neg && is_one(f.arg());
}

Formula strip_double_neg(Formula f) {
  while (f.kind() == Formula::Kind::Neg && f.arg().kind() == Formula::Kind::Neg) f = f.arg().arg();
  return f;
}

bool flatten(const Formula& in, std::vector<Literal>& out) {
  Formula x = strip_double_neg(in);
  if (x.kind() == Formula::Kind::Neg && x.arg().kind() == Formula::Kind::Imp && !is_one(x.arg())) {
    // !(a -> b) is a (.) !b
    return flatten(x.arg().arg(), out) && flatten(Formula::neg(x.arg().rhs()), out);
  }
  auto lit = as_literal(x);
  if (!lit) return false;
  out.push_back(*lit);
  return true;
}

}  // namespace

std::optional<EventLiteral> as_event_literal(const Event& e) {
  EventLiteral l;
  bool neg = false;
  Event cur = e;
  while (true) {
    switch (cur.kind()) {
      case Event::Kind::Not:
        neg = !neg;
        cur = cur.arg();
        break;
      case Event::Kind::Knows:
      case Event::Kind::Box: {
        Chain c = neg ? Chain::Diamond : Chain::Box;
        if (l.chain != Chain::None && l.chain != c) return std::nullopt;
        l.chain = c;
        l.prefix.push_back({cur.kind() == Event::Kind::Knows, cur.name()});
        cur = cur.arg();
        break;
      }
      case Event::Kind::Var:
        l.negated = neg;
        l.var = cur.name();
        return l;
      case Event::Kind::And: return std::nullopt;
    }
  }
}

std::optional<Literal> as_literal(const Formula& f) {
  Literal l;
  bool neg = false;
  Formula cur = f;
  while (true) {
    switch (cur.kind()) {
      case Formula::Kind::Neg:
        neg = !neg;
        cur = cur.arg();
        break;
      case Formula::Kind::Knows:
      case Formula::Kind::Box: {
        Chain c = neg ? Chain::Diamond : Chain::Box;
        if (l.chain != Chain::None && l.chain != c) return std::nullopt;
        l.chain = c;
        l.prefix.push_back({cur.kind() == Formula::Kind::Knows, cur.name()});
        cur = cur.arg();
        break;
      }
      case Formula::Kind::Pr: {
        auto inner = as_event_literal(cur.event());
        if (!inner || inner->negated) return std::nullopt;
        l.prob = true;
        l.negated = neg;
        l.agent = cur.name();
        l.event = cur.event();
        return l;
      }
      case Formula::Kind::Var:
        l.prob = false;
        l.negated = neg;
        l.var = cur.name();
        return l;
      default: return std::nullopt;
    }
  }
}

Literal Literal::negation() const {
  Literal n = *this;
  n.negated = !negated;
  if (chain == Chain::Box) n.chain = Chain::Diamond;
  else if (chain == Chain::Diamond) n.chain = Chain::Box;
  return n;
}

Formula Literal::to_formula() const {
  Formula f = prob ? Formula::pr(agent, event) : Formula::var(var);
  if (negated) f = Formula::neg(f);
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) {
    if (chain == Chain::Diamond) f = it->knows ? Formula::kdiamond(it->label, f) : Formula::diamond(it->label, f);
    else f = it->knows ? Formula::knows(it->label, f) : Formula::box(it->label, f);
  }
  return f;
}

std::optional<Rule> as_rule(const Formula& f) {
  Formula cur = f;
  if (cur.kind() != Formula::Kind::Imp || is_one(cur)) return std::nullopt;
  Rule r;
  while (cur.kind() == Formula::Kind::Imp && !is_one(cur)) {
    if (!flatten(cur.arg(), r.body)) return std::nullopt;
    cur = cur.rhs();
  }
  cur = strip_double_neg(cur);
  if (is_zero(cur)) return r;
  auto head = as_literal(cur);
  if (!head) return std::nullopt;
  r.head = *head;
  return r;
}

bool is_upr_rule(const Rule& r) {
  std::vector<Literal> body = r.body;
  std::optional<Literal> head = r.head;
  // a diamond or propositional head moves to the body as a box literal
  if (head && (!head->proper() || head->chain == Chain::Diamond)) {
    body.push_back(head->negation());
    head.reset();
  }
  for (const Literal& l : body) {
    if (!l.prob || !l.is_box()) return false;
    if (head && !l.proper()) return false;
  }
  return !head || head->prob;
}

bool is_epr_rule(const Rule& r) {
  std::vector<Literal> body = r.body;
  std::optional<Literal> head = r.head;
  if (head && !head->proper()) {
    body.push_back(head->negation());
    head.reset();
  }
  for (const Literal& l : body) {
    if (!l.prob) return false;
    if (head) {
      if (!l.proper() || l.chain != Chain::Diamond || l.negated) return false;
    } else if (l.proper() && (l.chain != Chain::Diamond || l.negated)) {
      return false;
    }
  }
  if (head) return head->prob && head->chain == Chain::Diamond && !head->negated;
  return true;
}

FragmentClass classify(const Formula& f) {
  if (auto lit = as_literal(f)) {
    FragmentClass c;
    c.proper = lit->proper();
    if (!lit->prob) c.tag = lit->is_box() ? FragmentTag::UML_box : FragmentTag::UML_diamond;
    else if (!lit->proper()) c.tag = FragmentTag::UPL_set_member;
    else if (lit->chain == Chain::Box) c.tag = FragmentTag::UPL_box;
    else if (lit->negated) c.tag = FragmentTag::UPR_rule;  // <a>!Pr is the rule [a]Pr -> 0
    else c.tag = FragmentTag::UPL_diamond;
    return c;
  }
  auto rule = as_rule(f);
  if (!rule) return {};
  if (rule->body.size() == 1 && !rule->head) return classify(rule->body[0].negation().to_formula());
  FragmentClass c;
  for (const Literal& l : rule->body) c.proper = c.proper || l.proper();
  if (rule->head) c.proper = c.proper || rule->head->proper();
  if (is_upr_rule(*rule)) c.tag = FragmentTag::UPR_rule;
  else if (is_epr_rule(*rule)) c.tag = FragmentTag::EPR_rule;
  else c.proper = false;
  return c;
}

TheoryKind classify_theory(const std::vector<Formula>& theory) {
  bool upr = true, epr = true;
  for (const Formula& f : theory) {
    if (auto lit = as_literal(f)) {
      if (!lit->prob) return TheoryKind::Neither;
      continue;
    }
    auto rule = as_rule(f);
    if (!rule) return TheoryKind::Neither;
    upr = upr && is_upr_rule(*rule);
    epr = epr && is_epr_rule(*rule);
  }
  if (upr) return TheoryKind::UPR;
  if (epr) return TheoryKind::EPR;
  return TheoryKind::Neither;
}

}  // namespace eapr
