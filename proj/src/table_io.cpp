#include "atomprune/table_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "atomprune/errors.hpp"
#include "atomprune/text_io.hpp"

namespace atomprune {

namespace {

std::string format_sweep_value(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  return format_value(v);
}

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", p);
  return buf;
}

nlohmann::ordered_json distortion_to_json(double d) {
  if (std::isinf(d)) return "inf";
  return d;
}

double distortion_from_json(const nlohmann::ordered_json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw IoError("table_from_json: bad distortion value");
  }
  return j.get<double>();
}

}  // namespace

std::string table_to_csv(const ExperimentTable& table) {
  const bool probabilities = table.aggregate_kind == "failure_probability";
  std::ostringstream os;
  os << table.sweep_parameter;
  for (const auto& algo : table.algorithms) os << ',' << algo;
  if (!probabilities) {
    for (const auto& algo : table.algorithms) os << ',' << algo << "_diverged";
  }
  os << '\n';
  for (std::size_t s = 0; s < table.sweep_values.size(); ++s) {
    os << format_sweep_value(table.sweep_values[s]);
    std::vector<std::size_t> diverged(table.algorithms.size());
    for (std::size_t a = 0; a < table.algorithms.size(); ++a) {
      const auto [value, div_count] = table.aggregate(s, a);
      diverged[a] = div_count;
      os << ',';
      if (probabilities) {
        os << format_probability(value);
      } else if (std::isinf(value)) {
        os << "inf";
      } else {
        os << format_value(value);
      }
    }
    if (!probabilities) {
      for (std::size_t a = 0; a < table.algorithms.size(); ++a) os << ',' << diverged[a];
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::ordered_json table_to_json(const ExperimentTable& table) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["experiment"] = table.experiment;
  j["sweep_parameter"] = table.sweep_parameter;
  j["aggregate_kind"] = table.aggregate_kind;
  j["sweep_values"] = table.sweep_values;
  j["algorithms"] = table.algorithms;
  j["trials"] = table.trials;
  j["master_seed"] = table.master_seed;
  j["config"] = table.config;
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const TrialRecord& r : table.records) {
    records.push_back({{"sweep_index", r.sweep_index},
                       {"trial_index", r.trial_index},
                       {"algorithm", r.algorithm},
                       {"distortion", distortion_to_json(r.distortion)},
                       {"success", r.success},
                       {"skipped", r.skipped},
                       {"diverged", r.diverged}});
  }
  j["records"] = std::move(records);
  return j;
}

ExperimentTable table_from_json(const nlohmann::ordered_json& j) {
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1) {
    throw IoError("table_from_json: unsupported schema version");
  }
  ExperimentTable table;
  table.experiment = j.at("experiment").get<std::string>();
  table.sweep_parameter = j.at("sweep_parameter").get<std::string>();
  table.aggregate_kind = j.at("aggregate_kind").get<std::string>();
  table.sweep_values = j.at("sweep_values").get<std::vector<double>>();
  table.algorithms = j.at("algorithms").get<std::vector<std::string>>();
  table.trials = j.at("trials").get<std::size_t>();
  table.master_seed = j.at("master_seed").get<std::uint64_t>();
  table.config = j.at("config");
  for (const auto& rj : j.at("records")) {
    TrialRecord r;
    r.sweep_index = rj.at("sweep_index").get<std::size_t>();
    r.trial_index = rj.at("trial_index").get<std::size_t>();
    r.algorithm = rj.at("algorithm").get<std::string>();
    r.distortion = distortion_from_json(rj.at("distortion"));
    r.success = rj.at("success").get<bool>();
    r.skipped = rj.at("skipped").get<bool>();
    r.diverged = rj.at("diverged").get<bool>();
    table.records.push_back(std::move(r));
  }
  return table;
}

std::string sidecar_path(const std::string& csv_path) {
  const auto dot = csv_path.find_last_of('.');
  const auto slash = csv_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return csv_path + ".json";
  }
  return csv_path.substr(0, dot) + ".json";
}

void write_table(const ExperimentTable& table, const std::string& csv_path) {
  {
    std::ofstream os(csv_path);
    if (!os) throw IoError("cannot open for writing: " + csv_path);
    os << table_to_csv(table);
    if (!os) throw IoError("write failed: " + csv_path);
  }
  const std::string json_path = sidecar_path(csv_path);
  std::ofstream os(json_path);
  if (!os) throw IoError("cannot open for writing: " + json_path);
  os << table_to_json(table).dump(2) << '\n';
  if (!os) throw IoError("write failed: " + json_path);
}

ExperimentTable read_table(const std::string& json_path) {
  std::ifstream is(json_path);
  if (!is) throw IoError("cannot open for reading: " + json_path);
  nlohmann::ordered_json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed table JSON at " + json_path + ": " + e.what());
  }
  return table_from_json(j);
}

void write_timings(const std::vector<TimingRecord>& timings, const std::string& csv_path) {
  std::ofstream os(csv_path);
  if (!os) throw IoError("cannot open for writing: " + csv_path);
  os << "sweep_index,trial_index,algorithm,seconds\n";
  for (const TimingRecord& t : timings) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", t.seconds);
    os << t.sweep_index << ',' << t.trial_index << ',' << t.algorithm << ',' << buf << '\n';
  }
  if (!os) throw IoError("write failed: " + csv_path);
}

}  // namespace atomprune
