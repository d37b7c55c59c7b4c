#pragma once

#include "eapr/semantics.hpp"
#include "eapr/syntax.hpp"

#include <cstddef>
#include <functional>

namespace eapr {

// Outer frames with at most `outer` worlds, inner event models with at most
// `inner` worlds, values and masses that are multiples of 1/grid.
struct OracleBounds {
  int outer = 2;
  int inner = 3;
  int grid = 4;
};

// NO_WITNESS_FOUND is not UNSAT: the search is bounded.
enum class OracleStatus { SAT, NO_WITNESS_FOUND };
const char* oracle_status_name(OracleStatus s);

struct OracleProbResult {
  OracleStatus status = OracleStatus::NO_WITNESS_FOUND;
  SIModel model;
  int world = 0;
  std::size_t examined = 0;  // models evaluated after deduplication
};

struct OracleModResult {
  OracleStatus status = OracleStatus::NO_WITNESS_FOUND;
  ModModel model;
  int world = 0;
  std::size_t examined = 0;
};

// First model found with value 1 at some world. Relations range over all
// subsets, E over all partitions, inner valuations over all boolean ones.
// Inner models with the same denotations of the Pr events, and measures
// giving the same Pr values, are evaluated once. Throws std::invalid_argument
// on variables outside Pr and on bounds below 1.
OracleProbResult oracle_sat_prob(const Formula& f, const OracleBounds& b = {});
OracleModResult oracle_sat_mod(const Formula& f, const OracleBounds& b = {});

// Every grid ModModel over the vocabulary of f, in enumeration order; stops
// when fn returns false. Returns the number visited.
std::size_t for_each_mod_model(const Formula& f, const OracleBounds& b, const std::function<bool(const ModModel&)>& fn);

// Size of the raw model space, counted by walking it without deduplication.
std::size_t oracle_space_prob(const Formula& f, const OracleBounds& b);
std::size_t oracle_space_mod(const Formula& f, const OracleBounds& b);

}  // namespace eapr
