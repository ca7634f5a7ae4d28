#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <kcross/design.hpp>
#include <kcross/kernels.hpp>
#include <kcross/smoother.hpp>
#include <kcross/truth.hpp>

namespace kcross::cli {

struct TruthConfig {
  std::string kind;  // polynomial | sine | logistic-bump
  std::vector<double> coefficients;
  double amplitude = 1.0, cycles = 1.0, phase = 0.0;
  double rise = 0.3, fall = 0.7, width = 0.05;
};

struct DistributionConfig {
  std::string kind = "uniform";  // uniform | linear | truncated-normal | piecewise-linear
  double a = 1.0, b = 0.0;       // linear density a + b t
  double mean = 0.5, sd = 0.3;   // truncated normal
  double knot = 0.5, left = 1.0, middle = 1.0, right = 1.0;
};

// Fixed value, the pilot rule, or the rate law scale * n^{-1/(2l+3)}.
struct HalfwidthConfig {
  enum class Mode { fixed, pilot, rate } mode = Mode::fixed;
  double value = 0.1;
};

struct CorollaryConfig {
  double c = 0.5;
  double halfwidth = 0.05;
};

struct Scenario {
  std::string name;
  TruthConfig truth;
  int order = 0;
  std::size_t n = 1000;
  HalfwidthConfig halfwidth;
  double pilot_safety = 1.0;
  std::optional<PolyKernel> kernel;
  DistributionConfig distribution;
  std::string design = "regular";  // regular | random
  std::uint64_t design_seed = 1;
  double noise_sd = 1.0;
  std::size_t reps = 0;
  std::uint64_t seed = 1;
  std::optional<std::pair<double, double>> interval;
  std::size_t grid_size = 4096;
  std::size_t moments_grid = 0;  // 0: smoother default for the interval
  std::optional<std::vector<double>> change_points;
  std::optional<double> window;
  std::optional<CorollaryConfig> corollary;
  std::optional<double> probe;
  std::vector<std::string> checks{"crossings"};
  std::filesystem::path source;
};

// Parse errors carry "file:line:column"; semantic errors name the key path
// and, where it can be located, its line. Both throw ConfigError.
Scenario parse_scenario(const std::string& text, const std::string& source_name = "<config>");
Scenario load_scenario(const std::filesystem::path& path);

struct Model {
  LimitDistribution distribution;
  Design design;
  SmootherSpec spec;
  KernelSmoother smoother;
  Truth truth;
  double a, b;  // counting interval
  std::vector<std::string> warnings;
};

double resolve_halfwidth(const Scenario& s, std::vector<std::string>& warnings);
Truth make_truth(const TruthConfig& c);
LimitDistribution make_distribution(const DistributionConfig& c);
Model build_model(const Scenario& s);

// Change points from the config, or sign changes of f^{(l)} on [h, 1 - h].
std::vector<double> resolve_change_points(const Scenario& s, const Model& m);

}  // namespace kcross::cli
