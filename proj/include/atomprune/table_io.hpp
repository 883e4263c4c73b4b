#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "atomprune/experiments.hpp"

namespace atomprune {

/// Aggregate CSV: one header row, the swept parameter first, then one column
/// per algorithm (failure probabilities with six decimals, distortions with
/// full precision) and, for distortion tables, one diverged-count column per
/// algorithm.
std::string table_to_csv(const ExperimentTable& table);

nlohmann::ordered_json table_to_json(const ExperimentTable& table);
ExperimentTable table_from_json(const nlohmann::ordered_json& j);

/// Writes the CSV to `csv_path` and the full-fidelity sidecar (config, seed,
/// every trial record) next to it with the extension swapped to .json.
/// Byte-identical for identical tables.
void write_table(const ExperimentTable& table, const std::string& csv_path);
ExperimentTable read_table(const std::string& json_path);

/// Wall-clock log, kept out of the reproducible outputs.
void write_timings(const std::vector<TimingRecord>& timings, const std::string& csv_path);

std::string sidecar_path(const std::string& csv_path);

}  // namespace atomprune
