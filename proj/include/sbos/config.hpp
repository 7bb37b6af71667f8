#pragma once

#include <string>
#include <vector>

#include "sbos/harness.hpp"

namespace sbos {

// Declarative experiment file: one plan plus CLI-level knobs. The JSON
// schema is normalized on parse, so parse -> serialize -> parse is the
// identity on every field.
struct RunConfig {
  ExperimentPlan plan;
  std::vector<std::string> policies;  // sweep candidates; may be empty
  std::string output_dir = "out";
  bool chart = false;
  bool pilot_diag = false;  // let diag fall back to a pilot run (queueing)

  bool operator==(const RunConfig&) const = default;
};

// Throws std::runtime_error with a line:column anchor on malformed JSON and
// with the offending field name on schema violations.
RunConfig parse_config(const std::string& json_text);

std::string serialize_config(const RunConfig& config);

RunConfig load_config_file(const std::string& path);

}  // namespace sbos
