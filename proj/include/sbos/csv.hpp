#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sbos {

// One (policy, budget) result line. Column order is frozen; downstream
// tooling keys on the header.
struct ResultRow {
  std::string experiment;
  std::string policy;
  std::string family;
  int system_count = 0;  // K
  int64_t budget = 0;    // T
  int replications = 0;
  double pcs = 0.0;
  double stderr_ = 0.0;
  double mean_evaluations = 0.0;
  uint64_t base_seed = 0;
  double wall_time_s = 0.0;
};

inline constexpr const char* kResultHeader =
    "experiment,policy,family,K,T,replications,pcs,stderr,mean_evaluations,"
    "base_seed,wall_time_s";

std::string to_csv(const std::vector<ResultRow>& rows);

// Parses a result table; throws with the offending column or line on
// schema mismatch.
std::vector<ResultRow> parse_result_csv(const std::string& text);

// Writes through a temp file and renames, so failed runs leave nothing
// partial behind.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace sbos
