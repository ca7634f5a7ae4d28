#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <kcross/changepoints.hpp>
#include <kcross/crossings.hpp>
#include <kcross/errors.hpp>
#include <kcross/montecarlo.hpp>
#include <kcross/text_format.hpp>

namespace kcross::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool wants(const Scenario& s, const std::string& check) {
  return std::find(s.checks.begin(), s.checks.end(), check) != s.checks.end();
}

std::vector<double> moments_grid(const Scenario& s, const Model& m) {
  const double h = m.spec.halfwidth();
  const std::size_t count =
      s.moments_grid ? s.moments_grid : std::max<std::size_t>(2048, static_cast<std::size_t>(std::ceil(50.0 / h)));
  std::vector<double> g(count);
  for (std::size_t j = 0; j < count; ++j)
    g[j] = j + 1 == count ? m.b : m.a + (m.b - m.a) * static_cast<double>(j) / static_cast<double>(count - 1);
  return g;
}

SimOptions sim_options(const Scenario& s, const RunOptions& opt) {
  SimOptions o;
  o.grid_size = s.grid_size;
  o.threads = opt.threads;
  return o;
}

std::string row_csv(const SummaryRow& r) {
  std::ostringstream os;
  os << r.check << ',' << format_double(r.analytic) << ',' << format_double(r.empirical) << ','
     << format_double(r.stderr_) << ',' << format_double(r.tolerance) << ',' << r.rule << ',' << r.verdict << ','
     << r.note << '\n';
  return os.str();
}

SummaryRow compare_mean(std::string check, double analytic, const SimResult& sim, double tol) {
  SummaryRow r{std::move(check), analytic, sim.mean_crossings, sim.stderr_, tol, "abs_diff_le_3se_plus_tol", "", ""};
  r.verdict = std::abs(analytic - sim.mean_crossings) <= 3.0 * sim.stderr_ + tol ? "pass" : "fail";
  if (!sim.resolved) r.note = "counting grid unresolved at cap";
  return r;
}

void write_moments_csv(std::ostream& os, const GPMoments& mom) {
  os << "t,m,dm,sigma,xi,mu,gamma,eta\n";
  for (std::size_t j = 0; j < mom.size(); ++j) {
    const PointMoments p = mom.at_node(j);
    os << format_double(mom.grid()[j]) << ',' << format_double(p.m) << ',' << format_double(p.dm) << ','
       << format_double(p.sigma) << ',' << format_double(p.xi) << ',' << format_double(p.mu) << ','
       << format_double(p.gamma()) << ',' << format_double(p.eta()) << '\n';
  }
}

void write_plot_csv(std::ostream& os, const GPMoments& mom) {
  os << "x,y,series\n";
  for (std::size_t j = 0; j < mom.size(); ++j) {
    const PointMoments p = mom.at_node(j);
    const double t = mom.grid()[j];
    const double w = p.xi * p.gamma() / p.sigma * phi(p.M());
    os << format_double(t) << ',' << format_double(p.M()) << ",standardized_mean\n";
    os << format_double(t) << ',' << format_double(w * Q(p.eta())) << ",classic_integrand\n";
    os << format_double(t) << ',' << format_double(w * Qtilde(p.eta())) << ",residual_integrand\n";
  }
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + '\n';
  return out;
}

}  // namespace

bool RunResult::all_passed() const {
  return std::none_of(summary.begin(), summary.end(), [](const SummaryRow& r) { return r.verdict == "fail"; });
}

RunResult run_scenario(Scenario sc, const RunOptions& opt) {
  if (opt.seed) sc.seed = *opt.seed;
  if (opt.reps) sc.reps = *opt.reps;
  const Model model = build_model(sc);
  const KernelSmoother& sm = model.smoother;
  RunResult out;
  out.warnings = model.warnings;

  const GPMoments mom = sm.gp_moments(model.truth, moments_grid(sc, model));
  CrossingOptions copt;
  copt.abs_tol = opt.quadrature_tol;
  copt.enforce_consistency = false;
  const IntegralEstimate classic = expected_zeros_classic(mom, copt);

  std::optional<CrossingReport> alt;
  std::optional<ExtremaProfile> profile;
  try {
    alt = expected_zeros_alternate(mom, copt);
    profile = find_extrema(mom);
  } catch (const DegenerateProcessError& e) {
    out.warnings.push_back(std::string("alternate form unavailable: ") + e.what());
  }
  const double analytic = alt ? alt->expected_zeros : classic.value;

  std::ostringstream report;
  report << "scenario = " << sc.name << '\n'
         << "halfwidth = " << format_double(model.spec.halfwidth()) << '\n'
         << "interval_lo = " << format_double(model.a) << '\n'
         << "interval_hi = " << format_double(model.b) << '\n'
         << "classic_expected_zeros = " << format_double(classic.value) << '\n'
         << "classic_error_estimate = " << format_double(classic.error) << '\n';
  if (alt) report << to_key_value(*alt);
  else report << "alternate = unavailable\n";

  if (wants(sc, "consistency")) {
    if (alt) {
      SummaryRow r{"consistency", alt->expected_zeros, classic.value, 0.0, alt->tolerance, "abs_diff_le_tol", "", ""};
      r.verdict = std::abs(alt->consistency_gap()) <= alt->tolerance ? "pass" : "fail";
      out.summary.push_back(r);
    } else {
      out.summary.push_back({"consistency", kNaN, classic.value, 0.0, 0.0, "abs_diff_le_tol", "skip",
                             "mean vanishes on an interval"});
    }
  }

  // Change-point analysis.
  std::ostringstream cp_csv;
  write_changepoint_header(cp_csv);
  std::optional<ChangePointProblem> problem;
  auto skip_changepoints = [&](const std::exception& e) {
    problem.reset();
    cp_csv.str("");
    write_changepoint_header(cp_csv);
    out.warnings.push_back(std::string("change-point analysis skipped: ") + e.what());
  };
  const bool cp_needed = wants(sc, "changepoint_excess") || wants(sc, "tail_bound");
  try {
    const std::vector<double> cps = resolve_change_points(sc, model);
    if (!cps.empty() || cp_needed) {
      problem.emplace(model.truth, cps, model.spec, model.distribution, sc.n);
      for (const auto& w : problem->warnings()) out.warnings.push_back(w);
      write_changepoint_rows(cp_csv, *problem);
    }
  } catch (const std::invalid_argument& e) {
    if (cp_needed) throw;
    skip_changepoints(e);
  } catch (const DegenerateChangePointError& e) {
    if (cp_needed) throw;
    skip_changepoints(e);
  }

  std::ostringstream sim_csv;
  write_sim_header(sim_csv);
  const SimOptions so = sim_options(sc, opt);
  const bool mc = sc.reps > 0;
  auto record = [&](const SimResult& sim) {
    write_sim_row(sim_csv, sim);
    if (!sim.resolved)
      out.warnings.push_back(sim.label + ": counting grid still unresolved at " + std::to_string(sim.counting_grid_size) +
                             " cells");
  };

  if (wants(sc, "crossings") && mc) {
    const SimResult sim = simulate_crossings(sm, model.truth, model.a, model.b, sc.reps, sc.seed, so);
    record(sim);
    out.summary.push_back(compare_mean("crossings", analytic, sim, 2.0 * opt.quadrature_tol));
  }
  if (wants(sc, "changepoint_excess") && mc) {
    const FalseChangePoints pred = expected_false_changepoints(*problem);
    for (const auto& w : pred.warnings) out.warnings.push_back(w);
    const SimResult sim = simulate_changepoint_excess(sm, model.truth, problem->change_points(), sc.reps, sc.seed, so);
    record(sim);
    out.summary.push_back(compare_mean("changepoint_excess", pred.excess, sim, 0.0));
  }
  if (wants(sc, "tail_bound") && mc) {
    if (!sc.window) throw ConfigError("check tail_bound needs a 'window'");
    const TailBound tb = tail_bound(*problem, *sc.window);
    for (const auto& w : tb.warnings) out.warnings.push_back("tail_bound: " + w);
    const SimResult sim =
        simulate_outside_window_frequency(sm, model.truth, problem->change_points(), *sc.window, sc.reps, sc.seed, so);
    record(sim);
    SummaryRow r{"tail_bound", tb.value, sim.mean_crossings, sim.stderr_, 0.0, "empirical_le_10x_analytic", "", ""};
    r.verdict = sim.mean_crossings <= 10.0 * tb.value ? "pass" : "fail";
    r.note = "order-term bound with constant 1";
    out.summary.push_back(r);
  }
  if (wants(sc, "corollary")) {
    if (!sc.corollary) throw ConfigError("check corollary needs a 'corollary' section");
    if (!alt) {
      out.summary.push_back({"corollary", kNaN, kNaN, 0.0, 0.0, "analytic_ge_empirical", "skip",
                             "alternate form unavailable"});
    } else {
      std::vector<CorollaryWindow> windows;
      for (const auto& z : profile->zeros)
        if (!z.at_endpoint) windows.push_back({z.location, sc.corollary->halfwidth});
      const double excess = alt->expected_zeros - alt->n_z0;
      try {
        const CorollaryBound cb = corollary_bound(mom, windows, sc.corollary->c);
        SummaryRow r{"corollary", cb.total, excess, 0.0, alt->tolerance, "analytic_ge_empirical", "", ""};
        r.verdict = cb.total >= excess - alt->tolerance ? "pass" : "fail";
        r.note = "bound vs E[N] - N0 (alternate form)";
        out.summary.push_back(r);
        report << "corollary_first_term = " << format_double(cb.first_term) << '\n'
               << "corollary_order_term = " << format_double(cb.order_term) << '\n'
               << "corollary_bound = " << format_double(cb.total) << '\n';
      } catch (const PreconditionError& e) {
        out.summary.push_back({"corollary", kNaN, excess, 0.0, 0.0, "analytic_ge_empirical", "skip",
                               "window hypotheses not verified"});
        out.warnings.push_back(std::string("corollary: ") + e.what());
      }
    }
  }

  std::ostringstream moments_csv, plot_csv, summary_csv;
  write_moments_csv(moments_csv, mom);
  write_plot_csv(plot_csv, mom);
  summary_csv << "check,analytic,empirical,stderr,tolerance,rule,verdict,note\n";
  for (const auto& r : out.summary) summary_csv << row_csv(r);

  out.files = {{"moments.csv", moments_csv.str()},   {"crossing_report.txt", report.str()},
               {"sim_results.csv", sim_csv.str()},   {"changepoints.csv", cp_csv.str()},
               {"summary.csv", summary_csv.str()},   {"plot.csv", plot_csv.str()},
               {"warnings.txt", join_lines(out.warnings)}};
  return out;
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "n") return SweepParam::n;
  if (name == "h" || name == "halfwidth") return SweepParam::h;
  if (name == "noise_sd") return SweepParam::noise_sd;
  throw ConfigError("sweep parameter must be one of n, h, noise_sd (got '" + name + "')");
}

namespace {

struct SweepRow {
  double value, n, h, noise_sd;
  double expected_zeros = kNaN;
  double mc_mean = kNaN, mc_stderr = kNaN;
  double predicted_excess = kNaN, mc_excess = kNaN, mc_excess_stderr = kNaN;
  double bias = kNaN, variance_ratio_error = kNaN, mu_sq = kNaN;
};

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) pts.emplace_back(std::log(x[i]), std::log(y[i]));
  if (pts.size() < 2) return kNaN;
  double mx = 0.0, my = 0.0;
  for (const auto& [a, b] : pts) {
    mx += a;
    my += b;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [a, b] : pts) {
    sxy += (a - mx) * (b - my);
    sxx += (a - mx) * (a - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

}  // namespace

SweepResult sweep_scenario(const Scenario& base, SweepParam param, const std::vector<double>& values,
                           const RunOptions& opt) {
  if (values.size() < 2) throw ConfigError("sweep needs at least two values");
  SweepResult out;
  std::vector<SweepRow> rows;
  for (double v : values) {
    Scenario sc = base;
    if (opt.seed) sc.seed = *opt.seed;
    if (opt.reps) sc.reps = *opt.reps;
    switch (param) {
      case SweepParam::n:
        if (!(v >= 2.0) || v != std::floor(v)) throw ConfigError("sweep over n needs integers >= 2");
        sc.n = static_cast<std::size_t>(v);
        break;
      case SweepParam::h:
        sc.halfwidth = {HalfwidthConfig::Mode::fixed, v};
        break;
      case SweepParam::noise_sd:
        if (!(v > 0.0)) throw ConfigError("sweep over noise_sd needs positive values");
        sc.noise_sd = v;
        break;
    }
    const Model model = build_model(sc);
    for (const auto& w : model.warnings) out.warnings.push_back(w);
    const KernelSmoother& sm = model.smoother;
    SweepRow row{v, static_cast<double>(sc.n), model.spec.halfwidth(), sc.noise_sd};

    const double t0 = sc.probe.value_or(0.5 * (model.a + model.b));
    const auto& pts = model.design.points();
    std::vector<double> fv(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) fv[i] = model.truth(pts[i]);
    const PointMoments p = sm.moments(t0, fv);
    const AsymptoticMoments am = asymptotic_moments(model.spec, model.distribution, sc.n, t0);
    row.bias = std::abs(p.m - model.truth.derivative(t0, sc.order));
    row.variance_ratio_error = std::abs(p.sigma * p.sigma / (am.sigma * am.sigma) - 1.0);
    row.mu_sq = p.mu * p.mu;

    // The full moment profile costs O(N) per node; skip it unless asked for.
    if (wants(sc, "crossings") || wants(sc, "consistency")) {
      const GPMoments mom = sm.gp_moments(model.truth, moments_grid(sc, model));
      CrossingOptions copt;
      copt.abs_tol = opt.quadrature_tol;
      row.expected_zeros = expected_zeros_classic(mom, copt).value;
    }

    const SimOptions so = sim_options(sc, opt);
    if (wants(sc, "crossings") && sc.reps > 0) {
      const SimResult sim = simulate_crossings(sm, model.truth, model.a, model.b, sc.reps, sc.seed, so);
      row.mc_mean = sim.mean_crossings;
      row.mc_stderr = sim.stderr_;
    }
    try {
      const std::vector<double> cps = resolve_change_points(sc, model);
      if (!cps.empty()) {
        const ChangePointProblem prob(model.truth, cps, model.spec, model.distribution, sc.n);
        row.predicted_excess = expected_false_changepoints(prob).excess;
        if (wants(sc, "changepoint_excess") && sc.reps > 0) {
          const SimResult sim = simulate_changepoint_excess(sm, model.truth, prob.change_points(), sc.reps, sc.seed, so);
          row.mc_excess = sim.mean_crossings;
          row.mc_excess_stderr = sim.stderr_;
        }
      }
    } catch (const std::invalid_argument& e) {
      out.warnings.push_back(std::string("change-point analysis skipped: ") + e.what());
    } catch (const DegenerateChangePointError& e) {
      out.warnings.push_back(std::string("change-point analysis skipped: ") + e.what());
    }
    rows.push_back(row);
  }

  const char* pname = param == SweepParam::n ? "n" : (param == SweepParam::h ? "h" : "noise_sd");
  std::ostringstream table, slopes, plot;
  table << "value,n,h,noise_sd,expected_zeros,mc_mean,mc_stderr,predicted_excess,mc_excess,mc_excess_stderr,bias,"
           "variance_ratio_error,mu_sq\n";
  for (const auto& r : rows) {
    for (double x : {r.value, r.n, r.h, r.noise_sd, r.expected_zeros, r.mc_mean, r.mc_stderr, r.predicted_excess,
                     r.mc_excess, r.mc_excess_stderr, r.bias, r.variance_ratio_error})
      table << format_double(x) << ',';
    table << format_double(r.mu_sq) << '\n';
  }
  std::vector<double> xs;
  for (const auto& r : rows) xs.push_back(r.value);
  auto column = [&](double SweepRow::*f) {
    std::vector<double> c;
    for (const auto& r : rows) c.push_back(r.*f);
    return c;
  };
  slopes << "parameter,column,loglog_slope\n";
  const std::pair<const char*, double SweepRow::*> cols[] = {{"expected_zeros", &SweepRow::expected_zeros},
                                                             {"predicted_excess", &SweepRow::predicted_excess},
                                                             {"mc_excess", &SweepRow::mc_excess},
                                                             {"bias", &SweepRow::bias},
                                                             {"variance_ratio_error", &SweepRow::variance_ratio_error},
                                                             {"mu_sq", &SweepRow::mu_sq}};
  plot << "x,y,series\n";
  for (const auto& [name, f] : cols) {
    slopes << pname << ',' << name << ',' << format_double(loglog_slope(xs, column(f))) << '\n';
    for (const auto& r : rows) plot << format_double(r.value) << ',' << format_double(r.*f) << ',' << name << '\n';
  }
  out.files = {{"sweep.csv", table.str()},
               {"sweep_slopes.csv", slopes.str()},
               {"sweep_plot.csv", plot.str()},
               {"warnings.txt", join_lines(out.warnings)}};
  return out;
}

void write_artifacts(const std::filesystem::path& dir, const Artifacts& files) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> staged;
  try {
    for (const auto& [name, content] : files) {
      const auto tmp = dir / (name + ".tmp");
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      os << content;
      os.close();
      if (!os) throw std::runtime_error("cannot write " + tmp.string());
      staged.push_back(tmp);
    }
  } catch (...) {
    for (const auto& p : staged) std::filesystem::remove(p);
    throw;
  }
  for (std::size_t i = 0; i < files.size(); ++i) std::filesystem::rename(staged[i], dir / files[i].first);
}

}  // namespace kcross::cli
