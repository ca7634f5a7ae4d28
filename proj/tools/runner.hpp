#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scenario.hpp"

namespace kcross::cli {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  double quadrature_tol = 1e-6;
  unsigned threads = 0;
};

// One comparison of an analytic prediction with its empirical counterpart.
// `rule` names how `verdict` follows from the numeric columns:
//   abs_diff_le_3se_plus_tol : |analytic - empirical| <= 3 stderr + tolerance
//   empirical_le_10x_analytic: empirical <= 10 analytic
//   analytic_ge_empirical    : analytic >= empirical - tolerance
//   abs_diff_le_tol          : |analytic - empirical| <= tolerance
struct SummaryRow {
  std::string check;
  double analytic = 0.0;
  double empirical = 0.0;
  double stderr_ = 0.0;
  double tolerance = 0.0;
  std::string rule;
  std::string verdict;  // pass | fail | skip
  std::string note;
};

// Named file contents, written together once the whole run succeeded.
using Artifacts = std::vector<std::pair<std::string, std::string>>;

struct RunResult {
  Artifacts files;
  std::vector<SummaryRow> summary;
  std::vector<std::string> warnings;
  bool all_passed() const;
};

RunResult run_scenario(Scenario sc, const RunOptions& opt);

enum class SweepParam { n, h, noise_sd };
SweepParam parse_sweep_param(const std::string& name);

struct SweepResult {
  Artifacts files;
  std::vector<std::string> warnings;
};

SweepResult sweep_scenario(const Scenario& sc, SweepParam param, const std::vector<double>& values,
                           const RunOptions& opt);

// Writes every artifact into dir/<name>.tmp first and renames afterwards,
// so a failure leaves no partial files behind.
void write_artifacts(const std::filesystem::path& dir, const Artifacts& files);

}  // namespace kcross::cli
