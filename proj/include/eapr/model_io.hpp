#pragma once

#include "eapr/semantics.hpp"

#include <string>

namespace eapr {

// SI model JSON:
//   {"outer_worlds": ["w0", ...] | n,
//    "epistemic": {"A": [["w0","w1"], ...]},
//    "actions": {"a": [["w0","w1"], ...]},
//    "inner": {"worlds": [...] | n, "epistemic": ..., "actions": ..., "valuation": {"p": ["x0"]}},
//    "mu": [{"world": "w0", "agent": "A", "masses": {"x0": "1/2", ...}}]}
// Worlds may be referenced by name or by index. Rationals are "m/n" strings.
SIModel si_model_from_json(const std::string& text);
std::string to_json(const SIModel& m);

// Modal model JSON: {"worlds", "epistemic", "actions", "values": {"p": {"w0": "1/2"}}}
ModModel mod_model_from_json(const std::string& text);
std::string to_json(const ModModel& m);

std::string read_file(const std::string& path);  // throws std::runtime_error if unreadable

}  // namespace eapr
