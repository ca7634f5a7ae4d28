#include "kcross/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "kcross/errors.hpp"
#include "kcross/text_format.hpp"

namespace kcross {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t rep) {
  return splitmix64(splitmix64(seed) ^ splitmix64(0x5851f42d4c957f2dULL + rep));
}

enum class Tally { crossings, any_crossing };

struct CountingTask {
  double a, b;
  Tally tally = Tally::crossings;
  // Nodes where this returns false are excluded; a cell counts only when
  // both of its ends are admitted.
  std::function<bool(double)> admit;
  double offset = 0.0;  // subtracted from every per-replicate count
};

// Statistic of one path at stride 1 (fine) and stride 2 (coarse).
struct PairCount {
  double fine, coarse;
};

double tally_path(const std::vector<double>& z, std::size_t stride, std::size_t B, std::size_t col,
                  const std::vector<char>& ok, Tally tally) {
  std::size_t count = 0;
  const std::size_t nodes = z.size() / B;
  for (std::size_t j = 0; j < nodes; j += stride) {
    if (!ok[j]) continue;
    const double v = z[j * B + col];
    if (v == 0.0) {
      ++count;
    } else if (j + stride < nodes && ok[j + stride]) {
      if (v * z[(j + stride) * B + col] < 0.0) ++count;
    }
    if (tally == Tally::any_crossing && count > 0) return 1.0;
  }
  return static_cast<double>(count);
}

std::vector<PairCount> run_replicates(const KernelSmoother& sm, const std::vector<double>& fvals,
                                      const CountingTask& task, std::size_t cells, std::size_t reps,
                                      std::uint64_t seed, const SimOptions& opt) {
  const std::size_t nodes = cells + 1;
  std::vector<double> grid(nodes);
  for (std::size_t j = 0; j < nodes; ++j)
    grid[j] = j + 1 == nodes ? task.b : task.a + (task.b - task.a) * static_cast<double>(j) / cells;
  std::vector<char> ok(nodes, 1);
  if (task.admit)
    for (std::size_t j = 0; j < nodes; ++j) ok[j] = task.admit(grid[j]) ? 1 : 0;

  const std::size_t n = fvals.size();
  const double h = sm.spec().halfwidth();
  const double c0 = sm.coefficient_factor();
  const PolyKernel& kern = sm.spec().estimator_kernel();
  const auto& pts = sm.design().points();
  const auto& scale = sm.point_scale();
  const double sd = sm.spec().noise_sd();
  std::vector<std::pair<std::size_t, std::size_t>> ranges(nodes);
  for (std::size_t j = 0; j < nodes; ++j) ranges[j] = sm.support_range(grid[j]);

  const std::size_t B = std::max<std::size_t>(1, opt.batch);
  const std::size_t batches = (reps + B - 1) / B;
  std::vector<PairCount> out(reps);

  auto work = [&](std::size_t batch) {
    const std::size_t r0 = batch * B;
    const std::size_t nb = std::min(B, reps - r0);
    std::vector<double> y(n * B, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      std::mt19937_64 gen(replicate_seed(seed, r0 + b));
      std::normal_distribution<double> noise(0.0, sd);
      for (std::size_t i = 0; i < n; ++i) y[i * B + b] = fvals[i] + noise(gen);
    }
    std::vector<double> z(nodes * B, 0.0);
    for (std::size_t j = 0; j < nodes; ++j) {
      double* zr = &z[j * B];
      for (std::size_t i = ranges[j].first; i < ranges[j].second; ++i) {
        const double w = c0 * scale[i] * kern.eval_polynomial((grid[j] - pts[i]) / h);
        const double* yr = &y[i * B];
        for (std::size_t b = 0; b < B; ++b) zr[b] += w * yr[b];
      }
    }
    for (std::size_t b = 0; b < nb; ++b) {
      out[r0 + b] = {tally_path(z, 1, B, b, ok, task.tally) - task.offset,
                     tally_path(z, 2, B, b, ok, task.tally) - task.offset};
    }
  };

  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, batches));
  if (threads <= 1) {
    for (std::size_t k = 0; k < batches; ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < batches; k = next++) work(k);
      });
  }
  return out;
}

SimResult simulate(const KernelSmoother& sm, const Truth& f, const CountingTask& task, std::size_t reps,
                   std::uint64_t seed, const SimOptions& opt, std::string label) {
  if (reps < 1) throw PreconditionError("simulation needs at least one replicate");
  if (opt.grid_size < 256) throw PreconditionError("counting grid needs at least 256 cells");
  if (opt.grid_size % 2 != 0) throw PreconditionError("counting grid size must be even");
  const double lo = sm.interior_lo(), hi = sm.interior_hi();
  if (!(task.a < task.b) || task.a < lo - 1e-12 || task.b > hi + 1e-12) {
    std::ostringstream msg;
    msg << "counting interval [" << task.a << ", " << task.b << "] must be a nonempty subset of [" << lo << ", "
        << hi << "]";
    throw PreconditionError(msg.str());
  }
  const auto& pts = sm.design().points();
  std::vector<double> fvals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) fvals[i] = f(pts[i]);

  SimResult res;
  res.label = std::move(label);
  res.seed = seed;
  res.replicates = reps;
  std::size_t cells = opt.grid_size;
  for (;;) {
    const auto counts = run_replicates(sm, fvals, task, cells, reps, seed, opt);
    double sum = 0.0, sum_c = 0.0;
    for (const auto& c : counts) {
      sum += c.fine;
      sum_c += c.coarse;
    }
    const double mean = sum / static_cast<double>(reps);
    double ss = 0.0;
    for (const auto& c : counts) ss += (c.fine - mean) * (c.fine - mean);
    res.mean_crossings = mean;
    res.coarse_mean = sum_c / static_cast<double>(reps);
    res.sd = reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1)) : 0.0;
    res.stderr_ = res.sd / std::sqrt(static_cast<double>(reps));
    res.counting_grid_size = cells;
    const bool pass = std::abs(res.mean_crossings - res.coarse_mean) <= 0.5 * res.stderr_;
    if (!opt.auto_refine || pass) {
      res.resolved = pass;
      break;
    }
    if (cells * 2 > opt.max_grid_size) {
      res.resolved = false;
      break;
    }
    cells *= 2;
  }
  return res;
}

std::vector<double> checked_change_points(std::span<const double> cps) {
  std::vector<double> x(cps.begin(), cps.end());
  for (double v : x)
    if (!(v > 0.0 && v < 1.0)) throw PreconditionError("change points must lie in (0, 1)");
  std::sort(x.begin(), x.end());
  return x;
}

}  // namespace

std::size_t count_sign_changes(std::span<const double> z) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] == 0.0) ++count;
    else if (j + 1 < z.size() && z[j] * z[j + 1] < 0.0) ++count;
  }
  return count;
}

SimResult simulate_crossings(const KernelSmoother& sm, const Truth& f, double a, double b, std::size_t reps,
                             std::uint64_t seed, const SimOptions& opt) {
  CountingTask task{a, b, Tally::crossings, {}, 0.0};
  return simulate(sm, f, task, reps, seed, opt, "crossings");
}

SimResult simulate_changepoint_excess(const KernelSmoother& sm, const Truth& f,
                                      std::span<const double> change_points, std::size_t reps, std::uint64_t seed,
                                      const SimOptions& opt) {
  const auto x = checked_change_points(change_points);
  CountingTask task{sm.interior_lo(), sm.interior_hi(), Tally::crossings, {}, static_cast<double>(x.size())};
  return simulate(sm, f, task, reps, seed, opt, "changepoint_excess");
}

SimResult simulate_outside_window_frequency(const KernelSmoother& sm, const Truth& f,
                                            std::span<const double> change_points, double w, std::size_t reps,
                                            std::uint64_t seed, const SimOptions& opt) {
  if (!(w > 0.0)) throw PreconditionError("window halfwidth must be positive");
  const auto x = checked_change_points(change_points);
  CountingTask task{sm.interior_lo(), sm.interior_hi(), Tally::any_crossing,
                    [x, w](double t) {
                      return std::all_of(x.begin(), x.end(), [&](double c) { return std::abs(t - c) >= w; });
                    },
                    0.0};
  return simulate(sm, f, task, reps, seed, opt, "outside_window_frequency");
}

void write_sim_header(std::ostream& os) {
  os << "label,mean,stderr,sd,replicates,counting_grid_size,coarse_mean,resolved,seed\n";
}

void write_sim_row(std::ostream& os, const SimResult& r) {
  os << r.label << ',' << format_double(r.mean_crossings) << ',' << format_double(r.stderr_) << ','
     << format_double(r.sd) << ',' << r.replicates << ',' << r.counting_grid_size << ','
     << format_double(r.coarse_mean) << ',' << (r.resolved ? 1 : 0) << ',' << r.seed << '\n';
}

}  // namespace kcross
