#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include <kcross/errors.hpp>

#include "runner.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumeric = 2, kCheckFailed = 3 };

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("KCROSS_OUT_DIR"); env && *env) return env;
  return "kcross-out";
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using namespace kcross;
  using namespace kcross::cli;

  CLI::App app{"Expected zero crossings of kernel-smoother derivative estimates"};
  app.require_subcommand(1);

  RunOptions opt;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::string out_dir;
  bool check = false;
  app.add_option("--seed", seed, "Override the scenario seed");
  app.add_option("--reps-override", reps, "Override the number of Monte Carlo replicates");
  app.add_option("--quadrature-tol", opt.quadrature_tol, "Absolute quadrature tolerance")->check(CLI::PositiveNumber);
  app.add_option("--threads", opt.threads, "Worker threads (0: all cores)");
  app.add_option("--out-dir", out_dir, "Output directory (default $KCROSS_OUT_DIR or ./kcross-out)");
  app.add_flag("--check", check, "Exit with status 3 when an acceptance check fails");

  std::string config;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("config", config, "Scenario file")->required();

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter of a scenario");
  std::string param;
  std::vector<double> values;
  sweep->add_option("config", config, "Scenario file")->required();
  sweep->add_option("--param", param, "n, h or noise_sd")->required();
  sweep->add_option("--values", values, "Parameter values, space or comma separated")->required()->delimiter(',')->expected(2, CLI::detail::expected_max_vector_size);

  for (auto* sub : {run, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  opt.seed = seed;
  opt.reps = reps;
  const std::filesystem::path base = out_dir.empty() ? default_out_dir() : std::filesystem::path(out_dir);

  try {
    const Scenario sc = load_scenario(config);
    if (*run) {
      const RunResult r = run_scenario(sc, opt);
      print_warnings(r.warnings);
      write_artifacts(base / sc.name, r.files);
      for (const auto& row : r.summary)
        std::cout << row.check << ": " << row.verdict << " (analytic " << row.analytic << ", empirical "
                  << row.empirical << ", stderr " << row.stderr_ << ")\n";
      std::cout << "wrote " << (base / sc.name).string() << '\n';
      if (check && !r.all_passed()) return kCheckFailed;
    } else {
      const SweepParam p = parse_sweep_param(param);
      const SweepResult r = sweep_scenario(sc, p, values, opt);
      print_warnings(r.warnings);
      write_artifacts(base / (sc.name + "-sweep-" + param), r.files);
      std::cout << "wrote " << (base / (sc.name + "-sweep-" + param)).string() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "numeric failure (precondition): " << e.what() << '\n';
    return kNumeric;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric failure (domain): " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
