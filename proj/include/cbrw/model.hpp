#pragma once

#include <cstdint>
#include <string>

#include "cbrw/catalysts.hpp"
#include "cbrw/walk.hpp"

namespace cbrw {

// A full problem instance: walk law, catalysts, start site.
struct Model {
    WalkSpec walk;
    CatalystSet catalysts;
    long start;
};

// Parses and validates the JSON config. Error messages name the JSON path of
// the offending field (e.g. "catalysts[0].offspring").
//
// Schema:
//   {
//     "walk": {"type": "simple", "p": 0.5}
//           | {"type": "general", "rates": {"1": 2.0, "-1": 1.0}},
//     "catalysts": [
//       {"position": 0, "alpha": 0.5, "beta": 1.0, "offspring": {"0": 0.5, "2": 0.5}}
//     ],
//     "start": 0
//   }
Model load_model(const std::string& json_text);
Model load_model_file(const std::string& path);

// Canonical dump of the parsed model: sorted keys, shortest round-trip floats.
// Semantically identical configs canonicalize identically.
std::string canonical_config_dump(const Model& model);

// FNV-1a 64 over the canonical dump.
std::uint64_t config_digest(const Model& model);

}  // namespace cbrw
