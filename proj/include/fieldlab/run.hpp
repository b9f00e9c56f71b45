#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fieldlab/scenario.hpp"

namespace fieldlab {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitConvergence = 2,
  kExitIdentity = 3,
};

/// One line of the results CSV.
struct ResultRow {
  std::string quantity;
  Vec3 at;
  double t = 0;
  Vec3 value;
  double err_est = 0;
  unsigned flags = 0;
};

struct RunResult {
  int exit_code = kExitOk;
  std::vector<ResultRow> rows;
  nlohmann::json summary;
  std::string csv_path, json_path;
};

/// Column header of the results CSV.
const char* csv_header();
/// Rows as CSV text (header included); numbers printed with %.17g.
std::string format_csv(RunKind run, const std::vector<ResultRow>& rows);

/// Executes the scenario and writes its CSV and JSON into s.output.dir.
/// Progress lines go to `log` unless it is null.
RunResult run_scenario(const Scenario& s, std::ostream* log = nullptr);

}  // namespace fieldlab
