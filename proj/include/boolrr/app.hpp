#pragma once

// Command-line front end. Every subcommand produces a RunRecord whose
// payload (config echo + results) depends only on the arguments, so two
// runs with the same seed emit byte-identical payloads.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace boolrr {

enum class OutputFormat { kJson, kCsv };

struct ExperimentConfig {
  std::string command;
  std::string fn;
  std::vector<double> rho;
  std::vector<double> t;
  std::optional<double> eps;
  std::optional<double> delta;
  double p = 0.5;
  double theta = 0.1;
  double T = 1.0;
  int M = 0;
  int m = -1;
  int n = 3;
  double grid = 0.1;
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string mode = "fixed";
  std::string x = "random";
  std::string influence = "flip";
  bool exact = false;
  bool exhaustive = false;
  bool emit_path = false;
  bool complement = false;
  bool discrete = false;
  OutputFormat format = OutputFormat::kJson;
  std::string out;
};

struct RunRecord {
  std::string command;
  nlohmann::json config;
  std::string version;
  double wall_time_s = 0.0;
  nlohmann::json results;
  int exit_code = 0;  // 0 ok, 2 a checked inequality or identity failed

  // The reproducible part: config echo and results.
  nlohmann::json payload() const { return {{"config", config}, {"results", results}}; }
};

RunRecord run(const ExperimentConfig& cfg);

// JSON line, or CSV with the config echoed in '#' header lines.
std::string emit(const RunRecord& record, OutputFormat format);

// Parses argv, runs and writes to `out` (or --out). Returns the process exit code:
// 0 success, 1 usage error, 2 invariant violated.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string version_string();

}  // namespace boolrr
