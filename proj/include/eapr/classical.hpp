#pragma once

#include "eapr/semantics.hpp"
#include "eapr/syntax.hpp"

#include <string>
#include <vector>

namespace eapr {

struct EaResult {
  bool sat = false;
  EventModel model;  // when sat; gamma holds at `world`
  int world = 0;
  std::size_t states = 0;  // states on the largest branch
};

// Classical satisfiability of a finite set of event formulas: S5 for every
// K_A, K for every [a]. Labelled tableau with class labels.
EaResult ea_sat(const std::vector<Event>& gamma);

struct MCS {
  std::vector<Event> members;  // sorted
  EventModel cert;             // members hold at cert world 0
  bool contains(const Event& e) const;
};

// All subsets of sf that pick one of every complementary pair and are
// classically satisfiable. sf must be closed under negation.
std::vector<MCS> mcs_enumerate(const std::vector<Event>& sf);

// Canonical model over the MCSs of sf: E_A relates sets agreeing on every
// K_A formula of sf, R_a relates D to T when every [a]b in D has b in T, and
// p holds where p is a member.
struct MCSModel {
  std::vector<MCS> worlds;
  EventModel model;
};
MCSModel build_mcs_model(const std::vector<Event>& sf);

// Pairs (world, formula) of sf where membership and truth disagree.
std::vector<std::pair<int, Event>> truth_lemma_failures(const MCSModel& m, const std::vector<Event>& sf);

}  // namespace eapr
