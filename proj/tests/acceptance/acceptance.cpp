// Acceptance harness: one PASS/FAIL line per criterion.
//
// The process exits nonzero when any criterion fails, except criteria listed
// in kUnattainable, whose statement is false as written. Those still print
// FAIL together with the reason.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kcross/crossings.hpp"
#include "kcross/design.hpp"
#include "kcross/gp_moments.hpp"
#include "kcross/quadrature.hpp"
#include "runner.hpp"
#include "scenario.hpp"

using namespace kcross;
using namespace kcross::cli;

namespace {

std::filesystem::path g_scenarios = KCROSS_SCENARIO_DIR;

struct Unattainable {
  int id;
  const char* reason;
};
// Qtilde(0) = 2 phi(0) > phi(0); the inequality only holds for |z| >= 0.6120.
const Unattainable kUnattainable[] = {
    {2, "Qtilde(0) = 2 phi(0) exceeds phi(0); the bound fails for every |z| < 0.612003 (true bound: Qtilde <= 2 phi)"}};

int g_hard_failures = 0;

const char* unattainable_reason(int id) {
  for (const auto& u : kUnattainable)
    if (u.id == id) return u.reason;
  return nullptr;
}

void report(int id, const std::string& title, bool ok, const std::string& detail, double seconds) {
  std::printf("criterion %2d: %s  %s  [%s] (%.1f s)\n", id, ok ? "PASS" : "FAIL", title.c_str(), detail.c_str(), seconds);
  if (!ok) {
    if (const char* why = unattainable_reason(id))
      std::printf("              documented as unattainable: %s\n", why);
    else
      ++g_hard_failures;
  }
  std::fflush(stdout);
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> z_points() {
  std::vector<double> z(10000);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = -8.0 + 16.0 * static_cast<double>(i) / 9999.0;
  return z;
}

Scenario scenario(const std::string& name) { return load_scenario(g_scenarios / (name + ".json")); }

// Full runs are shared between criteria.
const RunResult& full_run(const std::string& name) {
  static std::map<std::string, RunResult> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, run_scenario(scenario(name), RunOptions{})).first;
  return it->second;
}

const SummaryRow* find_row(const RunResult& r, const std::string& check) {
  for (const auto& row : r.summary)
    if (row.check == check) return &row;
  return nullptr;
}

std::string artifact(const Artifacts& files, const std::string& name) {
  for (const auto& [n, body] : files)
    if (n == name) return body;
  return {};
}

void criterion_1() {
  Timer t;
  double worst = 0.0;
  for (double z : z_points()) worst = std::max(worst, std::abs(Q(z) - std::abs(z) - Qtilde(z)));
  const double s = t.seconds();
  report(1, "Q(z) = |z| + Qtilde(z)", worst <= 1e-13 && s < 1.0, fmt("max gap %.3g, limit 1e-13", worst), s);
}

void criterion_2() {
  Timer t;
  int vs_phi = 0, vs_const = 0, vs_two_phi = 0;
  double widest = 0.0;
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (double z : z_points()) {
    const double q = Qtilde(z);
    if (q > phi(z)) {
      ++vs_phi;
      widest = std::max(widest, std::abs(z));
    }
    if (q > c) ++vs_const;
    if (q > 2.0 * phi(z)) ++vs_two_phi;
  }
  report(2, "Qtilde(z) <= phi(z) <= 1/sqrt(2 pi)", vs_phi == 0 && vs_const == 0,
         fmt("%d points above phi (all |z| <= %.4f), %d above 1/sqrt(2 pi), %d above 2 phi", vs_phi, widest, vs_const,
             vs_two_phi),
         t.seconds());
}

void criterion_3() {
  Timer t;
  std::vector<std::pair<std::string, GPMoments>> cases;
  cases.emplace_back("linear", GPMoments::from_function(
                                   [](double s) { return PointMoments{4.0 * (s - 0.5), 4.0, 0.7, 5.0, 0.0}; }, 0.0, 1.0,
                                   257));
  const double w = 5.0 * std::numbers::pi;
  cases.emplace_back("sine", GPMoments::from_function(
                                 [=](double s) { return PointMoments{std::sin(w * s), w * std::cos(w * s), 0.5, 3.0, 0.0}; },
                                 0.0, 1.0, 1025));
  cases.emplace_back("shifted-cosine", GPMoments::from_function(
                                           [=](double s) {
                                             return PointMoments{1.0 + 0.5 * std::cos(w * s), -0.5 * w * std::sin(w * s),
                                                                 0.8, 2.0, 0.0};
                                           },
                                           0.0, 1.0, 1025));
  for (const char* name : {"smoother-l0", "smoother-l1", "smoother-l2", "cubic-inflection"}) {
    const Model m = build_model(scenario(name));
    cases.emplace_back(name, m.smoother.gp_moments(m.truth));
  }
  CrossingOptions opt;
  opt.enforce_consistency = false;
  bool ok = true;
  double worst_ratio = 0.0;
  for (const auto& [name, mom] : cases) {
    const CrossingReport r = expected_zeros_alternate(mom, opt);
    const double gap = std::abs(r.consistency_gap());
    worst_ratio = std::max(worst_ratio, gap / r.tolerance);
    ok = ok && gap <= r.tolerance;
  }
  const double s = t.seconds();
  report(3, "classic and alternate forms agree", ok && s < 10.0,
         fmt("%zu processes, worst gap / tolerance %.3g", cases.size(), worst_ratio), s);
}

void criterion_4() {
  Timer t;
  const GPMoments mom = GPMoments::from_function([](double) { return PointMoments{0.0, 0.0, 1.0, 1.0, 0.0}; }, 0.0,
                                                 std::numbers::pi, 257);
  const double e = expected_zeros_classic(mom).value;
  report(4, "Rice reduction gives 1 on [0, pi]", std::abs(e - 1.0) <= 1e-8, fmt("|E - 1| = %.3g", std::abs(e - 1.0)),
         t.seconds());
}

void criterion_5() {
  Timer t;
  bool ok = true;
  std::string detail;
  for (const char* name : {"smoother-l0", "smoother-l1", "smoother-l2"}) {
    const Scenario sc = scenario(name);
    const RunResult& r = full_run(name);
    const SummaryRow* row = find_row(r, "crossings");
    const bool shape = sc.reps == 10000 && sc.n >= 500 && sc.n <= 5000;
    const bool hit = row && std::abs(row->analytic - row->empirical) <= 3.0 * row->stderr_;
    ok = ok && shape && hit;
    if (row)
      detail += fmt("%sl=%d N=%zu: %.4f vs %.4f +- %.4f", detail.empty() ? "" : "; ", sc.order, sc.n, row->analytic,
                    row->empirical, row->stderr_);
  }
  report(5, "Monte Carlo matches E[N_z] within 3 se", ok, detail, t.seconds());
}

void criterion_6() {
  Timer t;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const LimitDistribution dists[] = {LimitDistribution::uniform(), LimitDistribution::linear_density(1.0, 2.0),
                                     LimitDistribution::truncated_normal(0.5, 0.3),
                                     LimitDistribution::piecewise_linear(0.5, 1.0, 1.5, 0.8)};
  int cases = 0, violations = 0;
  double worst = 0.0;
  for (int c = 0; c < 60; ++c) {
    const LimitDistribution& F = dists[c % 4];
    const std::size_t n = 10 + static_cast<std::size_t>(u(rng) * 490.0);
    Design base = c % 3 == 0 ? regular_design(n, F) : random_design(n, F, 1000 + c);
    const double disc = star_discrepancy(base);
    const double wc = 0.5 + 2.0 * u(rng);
    std::vector<double> wts(n);
    for (auto& x : wts) x = 1.0 + wc * disc * (2.0 * u(rng) - 1.0);
    const Design d(base.points(), wts, F);

    std::function<double(double)> g;
    double tv = 0.0, sup = 0.0;
    std::vector<double> breaks;
    const double amp = 0.2 + 2.0 * u(rng);
    switch (c % 3) {
      case 0: {  // full-period sine: exact TV and sup
        const int k = 1 + static_cast<int>(u(rng) * 4.0);
        const double ph = 2.0 * std::numbers::pi * u(rng);
        g = [=](double s) { return amp * std::sin(2.0 * std::numbers::pi * k * s + ph); };
        tv = 4.0 * amp * k;
        sup = amp;
        break;
      }
      case 1: {  // step
        const double at = 0.1 + 0.8 * u(rng);
        g = [=](double s) { return s <= at ? amp : 0.0; };
        tv = amp;
        sup = amp;
        breaks.push_back(at);
        break;
      }
      default: {  // polynomial with turning points refined
        const double r1 = u(rng), r2 = u(rng);
        g = [=](double s) { return amp * (s - r1) * (s - r2) * (s - 0.5); };
        tv = total_variation_refined(g, 0.0, 1.0, 2001);
        for (int i = 0; i <= 20000; ++i) sup = std::max(sup, std::abs(g(i / 20000.0)));
        break;
      }
    }
    const KoksmaGap k = koksma_gap(g, tv, sup, d, wc, breaks);
    ++cases;
    worst = std::max(worst, k.lhs / k.bound);
    if (k.lhs > k.bound + k.quadrature_error) ++violations;
  }
  report(6, "Koksma bound holds", cases >= 50 && violations == 0,
         fmt("%d cases, %d violations, worst lhs / bound %.3g", cases, violations, worst), t.seconds());
}

void criterion_7() {
  Timer t;
  double worst = 0.0;
  for (const auto& F : {LimitDistribution::uniform(), LimitDistribution::truncated_normal(0.4, 0.25),
                        LimitDistribution::linear_density(1.0, 2.0)})
    for (std::size_t n : {10u, 100u, 1000u}) {
      const double d = star_discrepancy(regular_design(n, F));
      worst = std::max(worst, std::abs(d - 0.5 / static_cast<double>(n)));
    }
  report(7, "regular design has D* = 1/(2N)", worst <= 1e-12, fmt("max |D* - 1/(2N)| = %.3g over 3 F", worst),
         t.seconds());
}

// Parses sweep.csv into column vectors.
std::map<std::string, std::vector<double>> read_table(const std::string& text) {
  std::istringstream in(text);
  std::string line, cell;
  std::getline(in, line);
  std::vector<std::string> names;
  for (std::istringstream h(line); std::getline(h, cell, ',');) names.push_back(cell);
  std::map<std::string, std::vector<double>> cols;
  while (std::getline(in, line)) {
    std::istringstream r(line);
    for (std::size_t i = 0; std::getline(r, cell, ',') && i < names.size(); ++i) cols[names[i]].push_back(std::stod(cell));
  }
  return cols;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= x.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

bool decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

void criterion_8() {
  Timer t;
  const SweepResult r =
      sweep_scenario(scenario("variance-rate"), SweepParam::h, {0.2, 0.1, 0.05, 0.025, 0.0125}, RunOptions{});
  auto cols = read_table(artifact(r.files, "sweep.csv"));
  const auto& h = cols["h"];
  const auto& ve = cols["variance_ratio_error"];
  std::vector<double> abs_mu;
  for (double m2 : cols["mu_sq"]) abs_mu.push_back(std::sqrt(m2));
  const double sv = slope(h, ve), sm = slope(h, abs_mu);
  const bool ok = decreasing(ve) && decreasing(abs_mu) && sv >= 0.6 && sv <= 1.4 && sm >= 0.6 && sm <= 1.4;
  report(8, "variance ratio and mu converge at rate h", ok,
         fmt("slope |ratio - 1| %.3f, slope |mu| %.3f, final |ratio - 1| %.3g, final mu^2 %.3g", sv, sm, ve.back(),
             cols["mu_sq"].back()),
         t.seconds());
}

void criterion_9() {
  Timer t;
  const Scenario sc = scenario("cubic-inflection");
  const SummaryRow* row = find_row(full_run("cubic-inflection"), "changepoint_excess");
  const bool ok = row && sc.reps == 10000 && std::abs(row->analytic - 2.0 * H(1.0)) < 1e-3 &&
                  std::abs(row->analytic - row->empirical) <= 3.0 * row->stderr_;
  const double s = t.seconds();
  report(9, "false change-point excess matches simulation", ok && s < 600.0,
         row ? fmt("predicted %.4f (2H(1) = %.4f), simulated %.4f +- %.4f", row->analytic, 2.0 * H(1.0), row->empirical,
                   row->stderr_)
             : "no row",
         s);
}

void criterion_10() {
  Timer t;
  bool ok = true;
  int n = 0;
  std::string detail;
  for (const char* name : {"cubic-inflection", "mammen-sine"}) {
    const SummaryRow* row = find_row(full_run(name), "tail_bound");
    if (!row) {
      ok = false;
      continue;
    }
    ++n;
    ok = ok && row->empirical <= 10.0 * row->analytic;
    detail += fmt("%s%s: %.3g vs bound %.3g", detail.empty() ? "" : "; ", name, row->empirical, row->analytic);
  }
  report(10, "outside-window frequency within 10x tail bound", ok && n == 2, detail, t.seconds());
}

void criterion_11() {
  Timer t;
  bool ok = true;
  int verified = 0;
  std::string detail;
  for (const char* name : {"smoother-l0", "smoother-l1", "smoother-l2", "cubic-inflection", "mammen-sine"}) {
    const SummaryRow* row = find_row(full_run(name), "corollary");
    if (!row || row->verdict == "skip") continue;
    ++verified;
    ok = ok && row->analytic >= row->empirical;
    detail += fmt("%s%s: bound %.4g >= excess %.4g", detail.empty() ? "" : "; ", name, row->analytic, row->empirical);
  }
  report(11, "small-noise bound dominates E[N_z] - N_z^0", ok && verified > 0,
         fmt("%d verified; ", verified) + detail, t.seconds());
}

void criterion_12() {
  Timer t;
  bool ok = true;
  std::size_t files = 0;
  for (const char* name : {"smoother-l0", "cubic-inflection"}) {
    RunOptions base;
    base.reps = 1000;
    base.threads = 1;
    RunOptions many = base;
    many.threads = 4;
    const RunResult a = run_scenario(scenario(name), base);
    const RunResult b = run_scenario(scenario(name), many);
    const RunResult c = run_scenario(scenario(name), base);
    ok = ok && a.files == b.files && a.files == c.files;
    files += a.files.size();
  }
  report(12, "byte-identical tables across runs and thread counts", ok, fmt("%zu artifacts compared", files),
         t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_scenarios = argv[1];
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d unexpected failure(s)\n", g_hard_failures);
  return g_hard_failures == 0 ? 0 : 1;
}
