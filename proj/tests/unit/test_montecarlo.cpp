#include <doctest.h>

#include <sstream>

#include <kcross/crossings.hpp>
#include <kcross/errors.hpp>
#include <kcross/montecarlo.hpp>

using namespace kcross;

namespace {

KernelSmoother small_smoother(int l, double h, double sd, std::size_t n = 400) {
  return KernelSmoother(SmootherSpec(l, h, sd), regular_design(n, LimitDistribution::uniform()));
}

}  // namespace

TEST_CASE("sign-change counting rule") {
  CHECK(count_sign_changes(std::vector<double>{1.0, -1.0, 2.0}) == 2);
  CHECK(count_sign_changes(std::vector<double>{1.0, 0.0, -1.0}) == 1);
  CHECK(count_sign_changes(std::vector<double>{1.0, 0.0, 1.0}) == 1);
  CHECK(count_sign_changes(std::vector<double>{0.0, 0.0}) == 2);
  CHECK(count_sign_changes(std::vector<double>{}) == 0);
}

TEST_CASE("same seed, same result, any thread count") {
  const KernelSmoother sm = small_smoother(1, 0.15, 1.0);
  const Truth f = Truth::sine(0.3, 1.0);
  SimOptions one;
  one.threads = 1;
  one.grid_size = 512;
  SimOptions many = one;
  many.threads = 3;
  many.batch = 7;
  const SimResult a = simulate_crossings(sm, f, 0.15, 0.85, 300, 11, one);
  const SimResult b = simulate_crossings(sm, f, 0.15, 0.85, 300, 11, many);
  std::ostringstream ra, rb;
  write_sim_row(ra, a);
  write_sim_row(rb, b);
  CHECK(ra.str() == rb.str());
  const SimResult c = simulate_crossings(sm, f, 0.15, 0.85, 300, 12, one);
  CHECK(c.mean_crossings != a.mean_crossings);
}

TEST_CASE("vanishing noise recovers the deterministic zero count") {
  const KernelSmoother sm = small_smoother(0, 0.1, 1e-6);
  const Truth f = Truth::polynomial({-0.4, 1.0});
  const SimResult r = simulate_crossings(sm, f, 0.1, 0.9, 50, 1);
  CHECK(r.mean_crossings == 1.0);
  CHECK(r.stderr_ == 0.0);
  const KernelSmoother flat = small_smoother(2, 0.1, 1e-8);
  const Truth g = Truth::polynomial({0.0, 0.0, 1.0, 1.0});  // f'' = 6t + 2 > 0
  const SimResult e = simulate_changepoint_excess(flat, g, std::vector<double>{}, 20, 2);
  CHECK(e.mean_crossings == 0.0);
}

TEST_CASE("stationary surrogate agrees with the classic integral") {
  const KernelSmoother sm = small_smoother(0, 0.1, 1.0, 500);
  const double analytic = expected_zeros_classic(sm.gp_moments(Truth::zero())).value;
  const SimResult r = simulate_crossings(sm, Truth::zero(), 0.1, 0.9, 2000, 5);
  CHECK(std::abs(r.mean_crossings - analytic) <= 3.0 * r.stderr_);
  CHECK(r.resolved);
  CHECK(r.stderr_ > 0.0);
}

TEST_CASE("refinement never loses crossings on nested grids") {
  const KernelSmoother sm = small_smoother(1, 0.1, 1.0);
  SimOptions o;
  o.grid_size = 256;
  o.auto_refine = false;
  const SimResult r = simulate_crossings(sm, Truth::zero(), 0.1, 0.9, 200, 3, o);
  CHECK(r.mean_crossings >= r.coarse_mean);
}

TEST_CASE("outside-window frequency is a probability") {
  const KernelSmoother sm = small_smoother(0, 0.1, 0.5);
  const Truth f = Truth::polynomial({-0.5, 1.0});
  const std::vector<double> x{0.5};
  const SimResult r = simulate_outside_window_frequency(sm, f, x, 0.05, 400, 9);
  CHECK(r.mean_crossings >= 0.0);
  CHECK(r.mean_crossings <= 1.0);
}

TEST_CASE("input validation") {
  const KernelSmoother sm = small_smoother(0, 0.1, 1.0);
  SimOptions tiny;
  tiny.grid_size = 100;
  CHECK_THROWS_AS(simulate_crossings(sm, Truth::zero(), 0.1, 0.9, 10, 1, tiny), PreconditionError);
  CHECK_THROWS_AS(simulate_crossings(sm, Truth::zero(), 0.1, 0.9, 0, 1), PreconditionError);
  CHECK_THROWS_AS(simulate_crossings(sm, Truth::zero(), 0.0, 0.9, 10, 1), PreconditionError);
}
