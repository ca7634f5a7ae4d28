#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <kcross/errors.hpp>

#include "runner.hpp"
#include "scenario.hpp"

using namespace kcross;
using namespace kcross::cli;

namespace {

const char* kSmall = R"({
  "name": "unit-small",
  "truth": {"kind": "sine", "amplitude": 0.3, "cycles": 1.5},
  "order": 1,
  "n": 300,
  "halfwidth": 0.15,
  "noise_sd": 1.0,
  "reps": 200,
  "seed": 4,
  "grid_size": 512,
  "moments_grid": 400,
  "checks": ["crossings", "consistency"]
})";

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("scenario parsing") {
  const Scenario s = parse_scenario(kSmall);
  CHECK(s.name == "unit-small");
  CHECK(s.order == 1);
  CHECK(s.halfwidth.mode == HalfwidthConfig::Mode::fixed);
  CHECK(s.checks.size() == 2);
}

TEST_CASE("parse errors carry line diagnostics") {
  const std::string syntax = error_of("{\n  \"name\": \"x\",\n  \"order\": 1,,\n}");
  CHECK(syntax.find("cfg.json:3:") != std::string::npos);

  std::string bad = kSmall;
  bad.replace(bad.find("\"seed\": 4"), 9, "\"sed\": 4");
  const std::string unknown = error_of(bad);
  CHECK(unknown.find("sed: unknown key") != std::string::npos);
  CHECK(unknown.find("cfg.json:9:") != std::string::npos);

  std::string wrong = kSmall;
  wrong.replace(wrong.find("\"n\": 300"), 8, "\"n\": \"many\"");
  CHECK(error_of(wrong).find("n: has the wrong type") != std::string::npos);

  std::string truth = kSmall;
  truth.replace(truth.find("\"sine\""), 6, "\"cosine\"");
  CHECK(error_of(truth).find("unknown truth") != std::string::npos);
}

TEST_CASE("halfwidth resolution") {
  std::string pilot = kSmall;
  pilot.replace(pilot.find("0.15"), 4, "\"pilot\"");
  std::vector<std::string> warnings;
  const Scenario p = parse_scenario(pilot);
  CHECK(resolve_halfwidth(p, warnings) == doctest::Approx(0.45));
  CHECK(warnings.size() == 1);

  std::string rate = kSmall;
  rate.replace(rate.find("0.15"), 4, "{\"scale\": 0.5}");
  const Scenario r = parse_scenario(rate);
  CHECK(resolve_halfwidth(r, warnings) == doctest::Approx(0.5 * std::pow(300.0, -0.2)));

  std::string big = kSmall;
  big.replace(big.find("0.15"), 4, "0.7");
  CHECK_THROWS_AS(build_model(parse_scenario(big)), ConfigError);
}

TEST_CASE("runs are reproducible and write all artifacts atomically") {
  const Scenario s = parse_scenario(kSmall);
  RunOptions one;
  one.threads = 1;
  RunOptions two;
  two.threads = 2;
  const RunResult a = run_scenario(s, one);
  const RunResult b = run_scenario(s, two);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i] == b.files[i]);
  CHECK(a.all_passed());

  const auto dir = std::filesystem::temp_directory_path() / "kcross-unit-artifacts";
  std::filesystem::remove_all(dir);
  write_artifacts(dir, a.files);
  for (const auto& [name, content] : a.files) {
    std::ifstream in(dir / name, std::ios::binary);
    const std::string got((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(got == content);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep tables and slopes") {
  Scenario s = parse_scenario(kSmall);
  s.reps = 0;
  const SweepResult r = sweep_scenario(s, SweepParam::h, {0.2, 0.1}, {});
  REQUIRE(r.files.size() >= 2);
  CHECK(r.files[0].first == "sweep.csv");
  CHECK(r.files[1].second.find("h,bias,") != std::string::npos);
  CHECK_THROWS_AS(sweep_scenario(s, SweepParam::h, {0.2}, {}), ConfigError);
  CHECK_THROWS_AS(parse_sweep_param("kernel"), ConfigError);
}

TEST_CASE("every shipped scenario parses and builds") {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(KCROSS_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    INFO(entry.path().string());
    const Scenario sc = load_scenario(entry.path());
    CHECK(sc.name == entry.path().stem().string());
    CHECK_NOTHROW(build_model(sc));
    ++count;
  }
  CHECK(count >= 9);
}
