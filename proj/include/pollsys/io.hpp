#pragma once

#include <string>

#include "pollsys/config.hpp"

namespace pollsys {

// Config documents are JSON:
//
//   { "stations": [ { "lambda": 1.0, "nu": 1.0, "weight": 1.0,
//                     "service":    {"kind": "exponential", "mean": 0.45},
//                     "switchover": {"kind": "deterministic", "value": 1.0},
//                     "glue":       {"kind": "gamma", "shape": 2, "scale": 0.5}
//                   }, ... ] }
//
// "weight" is optional (default 1). Distribution params are keyed by kind:
// deterministic takes "value", exponential takes "mean", gamma takes "shape"
// and "scale". Unknown fields anywhere are rejected, and every error names
// the offending location (station index and field). Loading validates the
// parsed system, so an unstable or malformed config never reaches an engine.

SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);

// Serialization inverse: parse_config(format_config(cfg)) == cfg exactly,
// including every double bit pattern.
std::string format_config(const SystemConfig& cfg);
void save_config(const SystemConfig& cfg, const std::string& path);

} // namespace pollsys
