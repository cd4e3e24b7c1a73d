#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "riesz/grid.hpp"

namespace riesz {

// Configuration / CLI mistakes; mapped to exit code 1 by the CLI.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

struct ExperimentConfig {
  std::string experiment;
  int dim = 1;
  int n = 0;            // 0 -> per-dimension default (1024 / 128)
  bool box_set = false;
  std::array<double, 2> box_lo{{0.0, 0.0}};
  std::array<double, 2> box_hi{{1.0, 1.0}};
  std::vector<double> alphas;  // empty -> per-experiment default
  int sign = 0;                // 0 -> per-experiment default
  std::string u0_source = "indicator";
  double tau = 0.0;            // 0 -> default min(1e-3, 0.1/lambda)
  double T = 0.5;
  double tol = 0.0;            // 0 -> per-experiment default
  std::string out;             // empty -> "<experiment>.csv"
  int record_every = 1;
  int quad_n = 4096;
  std::string scheme = "mm";   // "mm" | "euler"
  bool plot = false;
};

struct SweepRow {
  double alpha = 0.0;
  std::string quantity;
  double value = 0.0;
  double limit_value = 0.0;
  double abs_error = 0.0;
  double runtime_ms = 0.0;  // reported on stdout; never written to the CSV
};

struct SweepReport {
  std::string experiment;
  std::string version;
  int dim = 1;
  int n = 0;
  double h = 0.0;
  std::vector<SweepRow> rows;  // sorted by alpha (then quantity)

  // CSV image (metadata lines are written with a leading "# ").
  std::vector<std::string> csv_meta;
  std::vector<std::string> csv_columns;
  std::vector<std::vector<std::string>> csv_rows;

  bool passed = true;
  std::string message;  // failure description when !passed
  std::string out_path;
};

const char* version_string();
std::string usage_text();

// Parses CLI arguments (without argv[0]). Handles --config key=value files;
// flags override file values. Throws UsageError on any problem.
ExperimentConfig parse_config(const std::vector<std::string>& args);

// Runs the experiment, writes the CSV (and optional gnuplot script), prints
// per-row progress to stdout, and returns the report. Throws UsageError for
// configuration problems and std::runtime_error for numeric failures.
SweepReport run(const ExperimentConfig& config);

// Initial-datum library: "indicator", "gaussian", "two-bump"/"twobump", or a
// field file path (whose grid must match dom).
GridField make_initial_datum(const std::string& source,
                             std::shared_ptr<const Domain> dom);

} // namespace riesz
