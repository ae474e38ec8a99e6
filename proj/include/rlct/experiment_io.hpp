#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rlct/bayes_experiment.hpp"

namespace rlct {

/// Parses the JSON config. Every field is mandatory except "wbic".
/// Throws ConfigError on missing, mistyped or invalid entries.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON (sorted keys, compact) of every field but output_path.
std::string canonical_config_json(const ExperimentConfig& cfg);
/// Full config as pretty-printed JSON; parse_config round-trips it.
std::string config_to_json(const ExperimentConfig& cfg);
/// 16 hex digits of FNV-1a 64 over canonical_config_json.
std::string config_hash(const ExperimentConfig& cfg);

const std::string& csv_header();
/// One CSV line without the newline. Doubles keep 17 significant digits;
/// a missing WBIC estimate is an empty field.
std::string format_record(const ExperimentRecord& rec);
ExperimentRecord parse_record(std::string_view line);
/// Reads every row of a results file; throws ConfigError on a bad header or row.
std::vector<ExperimentRecord> read_records(const std::string& path);

}  // namespace rlct
