#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <kcross/crossings.hpp>
#include <kcross/errors.hpp>
#include <kcross/montecarlo.hpp>
#include <kcross/smoother.hpp>

using namespace kcross;

namespace {

// Closed form for m = c (t - 1/2), constant sigma and xi, mu = 0 on [0, 1].
double linear_oracle(double c, double sigma, double xi) {
  const double z = c / xi;
  return Q(z) / z * (Phi(c / (2.0 * sigma)) - Phi(-c / (2.0 * sigma)));
}

GPMoments linear_process(double c, double sigma, double xi, std::size_t n = 513) {
  return GPMoments::from_function([=](double t) { return PointMoments{c * (t - 0.5), c, sigma, xi, 0.0}; }, 0.0, 1.0,
                                  n);
}

}  // namespace

TEST_CASE("normal distribution and Q-functions against high-precision values") {
  CHECK(Phi(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
  CHECK(Phi(-3.0) == doctest::Approx(0.001349898031630095).epsilon(1e-14));
  CHECK(Phi(-8.0) == doctest::Approx(6.220960574271784e-16).epsilon(1e-12));
  CHECK(Phi(2.5) == doctest::Approx(0.9937903346742239).epsilon(1e-15));
  CHECK(Q(0.0) == doctest::Approx(0.7978845608028654).epsilon(1e-15));
  CHECK(Q(3.0) == doctest::Approx(3.000764308634095).epsilon(1e-15));
  CHECK(Q(-3.0) == doctest::Approx(3.000764308634095).epsilon(1e-15));
  CHECK(std::abs(Q(10.0) - 10.0) < 1e-15);
  CHECK(Qtilde(1.0) == doctest::Approx(0.1666309411753726).epsilon(1e-14));
  CHECK(Qtilde(-0.5) == doctest::Approx(0.3955931148026121).epsilon(1e-14));
  CHECK(H(1.0) == doctest::Approx(0.0833154705876863).epsilon(1e-14));
  CHECK(H(0.1) == doctest::Approx(3.509353312047147).epsilon(1e-14));
  CHECK(H(1.5) == doctest::Approx(0.01953786250840309).epsilon(1e-13));
  CHECK(H(8.0) == doctest::Approx(9.4378e-18).epsilon(1e-3));
  CHECK_THROWS_AS(H(0.0), DomainError);
  CHECK_THROWS_AS(H(-1.0), DomainError);
  // Qtilde(z) / z = 2 H(z)
  for (double z : {0.3, 1.0, 2.2}) CHECK(Qtilde(z) / z == doctest::Approx(2.0 * H(z)).epsilon(1e-12));
}

TEST_CASE("Qtilde is bounded by 2 phi and exceeds phi only near the origin") {
  // Qtilde(z) = phi(z) exactly at |z| = z*, from a high-precision root.
  const double z_star = 0.6120031809624808;
  CHECK(Qtilde(0.0) == doctest::Approx(2.0 * phi(0.0)).epsilon(1e-15));
  CHECK(Qtilde(z_star) == doctest::Approx(phi(z_star)).epsilon(1e-12));
  for (int i = 0; i <= 4000; ++i) {
    const double z = -8.0 + 16.0 * i / 4000.0;
    CHECK(Qtilde(z) <= 2.0 * phi(z) * (1.0 + 1e-15));
    if (std::abs(z) > z_star + 1e-9) CHECK(Qtilde(z) <= phi(z));
    if (std::abs(z) < z_star - 1e-9) CHECK(Qtilde(z) > phi(z));
  }
}

TEST_CASE("Rice formula for the stationary zero-mean case") {
  auto rice = [](double xi) { return PointMoments{0.0, 0.0, 1.0, xi, 0.0}; };
  const auto a = GPMoments::from_function([&](double) { return rice(1.0); }, 0.0, std::numbers::pi, 257);
  CHECK(expected_zeros_classic(a).value == doctest::Approx(1.0).epsilon(1e-10));
  const auto b = GPMoments::from_function([&](double) { return rice(3.0); }, 0.0, 2.0, 257);
  CHECK(expected_zeros_classic(b).value == doctest::Approx(6.0 / std::numbers::pi).epsilon(1e-10));
  CHECK_THROWS_AS(expected_zeros_alternate(a), DegenerateProcessError);
}

TEST_CASE("linear mean with constant noise has a closed form") {
  for (double c : {0.5, 2.0, 10.0}) {
    const GPMoments mom = linear_process(c, 0.4, 1.3);
    CAPTURE(c);
    CHECK(expected_zeros_classic(mom, {1e-10}).value == doctest::Approx(linear_oracle(c, 0.4, 1.3)).epsilon(1e-9));
    const CrossingReport r = expected_zeros_alternate(mom, {1e-10});
    CHECK(r.expected_zeros == doctest::Approx(linear_oracle(c, 0.4, 1.3)).epsilon(1e-9));
    CHECK(r.n_z0 == 1.0);
    CHECK(r.maxima_count == 2);
    CHECK(r.minima_count == 0);
    CHECK(r.maxima_term == doctest::Approx(2.0 * Phi(-c / 0.8)));
  }
}

TEST_CASE("extrema profile of a sinusoidal mean") {
  const double w = 4.0 * std::numbers::pi;
  const GPMoments mom = GPMoments::from_function(
      [=](double t) { return PointMoments{std::sin(w * t), w * std::cos(w * t), 0.5, 3.0, 0.0}; }, 0.0, 1.0, 1025);
  const ExtremaProfile p = find_extrema(mom);
  CHECK(p.zero_count() == 5);
  CHECK(p.endpoint_zero_count() == 2);
  CHECK(p.maxima.size() == 4);
  CHECK(p.minima.empty());
  for (const auto& e : p.maxima) {
    CHECK(e.multiplicity == 2);
    CHECK(e.value == doctest::Approx(2.0).epsilon(1e-9));
  }
  const CrossingReport r = expected_zeros_alternate(mom);
  CHECK(r.endpoint_zeros == 2);
  CHECK(r.n_z0 == 3.0);
  CHECK(r.minima_term == doctest::Approx(1.0));
  CHECK(std::abs(r.consistency_gap()) <= r.tolerance);
}

TEST_CASE("nonzero minima carry multiplicity two") {
  // m = 1 + 0.5 cos(2 pi t): interior minimum at 1/2, no zeros.
  const double w = 2.0 * std::numbers::pi;
  const GPMoments mom = GPMoments::from_function(
      [=](double t) { return PointMoments{1.0 + 0.5 * std::cos(w * t), -0.5 * w * std::sin(w * t), 0.8, 2.0, 0.0}; },
      0.0, 1.0, 257);
  const ExtremaProfile p = find_extrema(mom);
  CHECK(p.zeros.empty());
  REQUIRE(p.minima.size() == 1);
  CHECK(p.minima[0].location == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p.minima[0].multiplicity == 2);
  CHECK(p.maxima.size() == 2);
  const CrossingReport r = expected_zeros_alternate(mom, {1e-9});
  CHECK(r.expected_zeros == doctest::Approx(r.classic_integral).epsilon(1e-8));
}

TEST_CASE("mean vanishing on an interval is degenerate for the alternate form") {
  const GPMoments mom = GPMoments::from_function(
      [](double t) { return t < 0.5 ? PointMoments{0.0, 0.0, 1.0, 1.0, 0.0} : PointMoments{t - 0.5, 1.0, 1.0, 1.0, 0.0}; },
      0.0, 1.0, 101);
  CHECK_THROWS_AS(find_extrema(mom), DegenerateProcessError);
}

TEST_CASE("alternate and classic forms agree on smoother-induced processes") {
  const auto U = LimitDistribution::uniform();
  for (int l : {0, 1, 2}) {
    const KernelSmoother sm(SmootherSpec(l, 0.1, 1.0), regular_design(600, U));
    const Truth f = Truth::sine(std::pow(0.1, l) , 1.5);
    const CrossingReport r = expected_zeros_alternate(sm.gp_moments(f));
    CAPTURE(l);
    CHECK(std::abs(r.consistency_gap()) <= r.tolerance);
    CHECK(r.n_z0 >= 1.0);
  }
}

TEST_CASE("small-noise bound dominates the excess over the deterministic count") {
  for (double sigma : {0.05, 0.1, 0.2}) {
    const GPMoments mom = linear_process(2.0, sigma, 1.0, 1025);
    const CrossingReport r = expected_zeros_alternate(mom, {1e-10});
    const std::vector<CorollaryWindow> win{{0.5, 0.2}};
    const CorollaryBound b = corollary_bound(mom, win, 0.5);
    CAPTURE(sigma);
    CHECK(b.total >= r.expected_zeros - r.n_z0);
    CHECK(b.psi.size() == 1);
  }
  const GPMoments mom = linear_process(2.0, 0.1, 1.0);
  const std::vector<CorollaryWindow> overlap{{0.4, 0.2}, {0.6, 0.2}};
  CHECK_THROWS_AS(corollary_bound(mom, overlap, 0.5), PreconditionError);
  CHECK_THROWS_AS(corollary_bound(mom, std::vector<CorollaryWindow>{{0.5, 0.2}}, 1.5), PreconditionError);
}

TEST_CASE("classic integral matches direct simulation of an explicit Gaussian path") {
  // Z(t) = (t - 1/2) / 0.3 + X cos(4 t) + Y sin(4 t): m = (t - 1/2)/0.3, sigma = 1,
  // xi = 4, mu = 0.
  const GPMoments mom = GPMoments::from_function(
      [](double t) { return PointMoments{(t - 0.5) / 0.3, 1.0 / 0.3, 1.0, 4.0, 0.0}; }, 0.0, 1.0, 257);
  const double analytic = expected_zeros_classic(mom, {1e-10}).value;

  std::mt19937_64 gen(2024);
  std::normal_distribution<double> nd;
  const int reps = 20000, cells = 2000;
  double sum = 0.0, sum2 = 0.0;
  std::vector<double> z(cells + 1);
  for (int r = 0; r < reps; ++r) {
    const double x = nd(gen), y = nd(gen);
    for (int j = 0; j <= cells; ++j) {
      const double t = static_cast<double>(j) / cells;
      z[j] = (t - 0.5) / 0.3 + x * std::cos(4.0 * t) + y * std::sin(4.0 * t);
    }
    const double c = static_cast<double>(count_sign_changes(z));
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / (reps - 1));
  CHECK(std::abs(mean - analytic) <= 3.0 * se);
}

TEST_CASE("key-value report lists every component") {
  const CrossingReport r = expected_zeros_alternate(linear_process(1.0, 0.3, 1.0));
  const std::string kv = to_key_value(r);
  for (const char* key : {"expected_zeros", "classic_integral", "n_z0", "minima_term", "maxima_term",
                          "residual_integral", "consistency_gap"})
    CHECK(kv.find(std::string(key) + " = ") != std::string::npos);
}
