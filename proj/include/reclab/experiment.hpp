#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace reclab {

using Json = nlohmann::ordered_json;

/// Fills defaults and validates; the returned document is the full config
/// echo that goes into the run record. Throws ConfigError.
Json normalize_config(const Json& raw);

struct RunOutcome {
  Json record;  // artifact, version, config echo, wall_time_s, results, warnings
  std::vector<std::pair<std::string, std::string>> csv_files;  // (filename, content)
  bool partial = false;  // some grid points hit a cap; results carry a warning
};

/// Executes one experiment. The results payload is a deterministic function
/// of the normalized config (bitwise in exact mode, to the last printed digit
/// in float mode).
RunOutcome run_experiment(const Json& config);

/// run_experiment + writes record.json and the CSV files under out_dir.
RunOutcome run_and_write(const Json& config, const std::string& out_dir);

struct ReplayResult {
  bool match = false;
  std::string first_divergence;  // JSON pointer of the first differing field
};

/// Re-executes the record's config echo and compares results payloads.
ReplayResult replay_record(const Json& record);

}  // namespace reclab
