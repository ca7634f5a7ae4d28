#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kcross/smoother.hpp"
#include "kcross/truth.hpp"

namespace kcross {

struct SimOptions {
  // Number of counting-grid cells over the counting interval.
  std::size_t grid_size = 4096;
  // Double the grid until the fine and half-resolution means differ by less
  // than stderr / 2, up to max_grid_size.
  bool auto_refine = true;
  std::size_t max_grid_size = 65536;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Replicates that share one pass over the kernel weights.
  std::size_t batch = 32;
};

struct SimResult {
  std::string label;
  double mean_crossings = 0.0;
  double stderr_ = 0.0;
  double sd = 0.0;
  std::size_t replicates = 0;
  std::size_t counting_grid_size = 0;
  std::uint64_t seed = 0;
  // Mean at half the reported resolution and whether the refinement
  // criterion was met below the cap.
  double coarse_mean = 0.0;
  bool resolved = true;

  double standard_error() const { return stderr_; }
};

// Sign changes of a sampled path: one per strictly negative product of
// neighbours plus one per node that is exactly zero.
std::size_t count_sign_changes(std::span<const double> z);

// Mean zero-crossing count of Z = fhat^{(l)} on [a, b] ⊂ [h, 1 - h] with
// y_i = f(t_i) + N(0, sd^2). Replicate r draws its noise from a generator
// seeded by (seed, r) alone, so results do not depend on threads or batching.
SimResult simulate_crossings(const KernelSmoother& sm, const Truth& f, double a, double b, std::size_t reps,
                             std::uint64_t seed, const SimOptions& opt = {});

// Zeros of Z on [h, 1 - h] minus the number of true change points.
SimResult simulate_changepoint_excess(const KernelSmoother& sm, const Truth& f,
                                      std::span<const double> change_points, std::size_t reps, std::uint64_t seed,
                                      const SimOptions& opt = {});

// Fraction of replicates with at least one zero of Z in [h, 1 - h] outside
// every window (x_k - w, x_k + w).
SimResult simulate_outside_window_frequency(const KernelSmoother& sm, const Truth& f,
                                            std::span<const double> change_points, double w, std::size_t reps,
                                            std::uint64_t seed, const SimOptions& opt = {});

void write_sim_header(std::ostream& os);
void write_sim_row(std::ostream& os, const SimResult& r);

}  // namespace kcross
