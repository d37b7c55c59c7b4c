#pragma once

#include "eapr/syntax.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eapr {

using WorldSet = std::vector<char>;  // characteristic vector over worlds

// Worlds are 0..size()-1. A missing agent is the identity relation, a missing
// action the empty relation and a missing variable the empty set.
struct EventModel {
  std::vector<std::string> names;                               // one per world
  std::map<std::string, std::vector<int>> E;                    // agent -> class id per world
  std::map<std::string, std::vector<std::vector<int>>> R;       // action -> successor lists
  std::map<std::string, WorldSet> V;                            // variable -> extension

  static EventModel with_worlds(int n);
  int size() const { return static_cast<int>(names.size()); }
  int add_world(std::string name = {});

  bool same_class(const std::string& agent, int u, int v) const;
  std::vector<int> eclass(const std::string& agent, int w) const;
  const std::vector<int>& successors(const std::string& action, int w) const;
  bool truth(const std::string& var, int w) const;
  void set_truth(const std::string& var, int w, bool b);
  void add_edge(const std::string& action, int from, int to);
  void set_classes(const std::string& agent, const std::vector<std::vector<int>>& classes);

  void validate() const;  // sizes, class ids, edge targets
};

WorldSet denote(const Event& e, const EventModel& m);
// Appends src as a disjoint copy; returns the index of src's world 0.
int append_disjoint(EventModel& dst, const EventModel& src);
bool holds(const Event& e, const EventModel& m, int w);

struct ModModel {
  EventModel frame;                                  // V unused
  std::map<std::string, std::vector<Rational>> v;    // variable -> value per world

  Rational value(const std::string& var, int w) const;
  void validate() const;
};

// Sample-independent model: outer frame, one shared inner event model, and a
// mass function over inner worlds for every (outer world, agent).
struct SIModel {
  EventModel outer;   // V unused
  EventModel inner;
  std::map<std::pair<int, std::string>, std::vector<Rational>> mu;

  const std::vector<Rational>& measure(int w, const std::string& agent) const;  // throws if absent
  void validate() const;  // masses >= 0 summing to exactly 1
};

// Standard model: one set of worlds carrying relations, valuation and
// measures over the same worlds.
struct StandardModel {
  EventModel frame;
  std::map<std::pair<int, std::string>, std::vector<Rational>> mu;
};

Rational eval_mod(const Formula& f, const ModModel& m, int w);
std::vector<Rational> eval_mod_all(const Formula& f, const ModModel& m);
Rational eval_prob(const Formula& f, const SIModel& m, int w);
std::vector<Rational> eval_prob_all(const Formula& f, const SIModel& m);
Rational eval_standard(const Formula& f, const StandardModel& m, int w);

// Measure of a set of worlds.
Rational mass(const std::vector<Rational>& mu, const WorldSet& x);

// W' = outer worlds followed by copies of the inner worlds. Outer worlds keep
// their measures (moved onto the inner copies); every inner copy gets a point
// mass on itself for each agent.
StandardModel si_to_standard(const SIModel& m);
int inner_copy(const SIModel& m, int inner_world);  // index of the copy in W'

std::pair<Rational, Rational> lower_upper(const std::vector<std::vector<Rational>>& measures, const WorldSet& x);

bool entails_on_model(const std::vector<Formula>& gamma, const Formula& chi, const SIModel& m, int w);
bool entails_on_model(const std::vector<Formula>& gamma, const Formula& chi, const ModModel& m, int w);

// Truth-value operations shared by every evaluator.
namespace ops {
Rational neg(const Rational& a);
Rational limp(const Rational& a, const Rational& b);
Rational prod(const Rational& a, const Rational& b);
Rational pimp(const Rational& a, const Rational& b);
}  // namespace ops

}  // namespace eapr
