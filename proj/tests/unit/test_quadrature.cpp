#include <doctest.h>

#include <cmath>
#include <numbers>

#include <kcross/quadrature.hpp>

using namespace kcross;

TEST_CASE("Gauss-Legendre rule integrates degree 29 exactly") {
  const GaussRule& r = gauss_legendre_15();
  double wsum = 0.0;
  for (double w : r.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
  for (int deg : {2, 10, 28}) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
    CHECK(s == doctest::Approx(2.0 / (deg + 1)).epsilon(1e-14));
  }
}

TEST_CASE("adaptive integration with kinks") {
  const std::vector<double> bp{0.3};
  const Integral r = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, 1e-12, bp);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(0.045 + 0.245).epsilon(1e-13));

  const Integral s = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10);
  CHECK(s.converged);
  CHECK(s.value == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  const Integral osc = integrate([](double x) { return std::sin(40.0 * x); }, 0.0, std::numbers::pi, 1e-12);
  CHECK(std::abs(osc.value) < 1e-11);
}

TEST_CASE("joint integration of several components") {
  const std::vector<double> part = make_partition(0.0, 2.0, std::vector<double>{1.0, 3.0, -1.0});
  CHECK(part == std::vector<double>{0.0, 1.0, 2.0});
  const auto r = integrate_partitioned<2>(
      [](double x) { return std::array<double, 2>{x * x, std::exp(x)}; }, part, {1e-12});
  CHECK(r.converged);
  CHECK(r.value[0] == doctest::Approx(8.0 / 3.0));
  CHECK(r.value[1] == doctest::Approx(std::exp(2.0) - 1.0));
}

TEST_CASE("exhausted budget is reported") {
  QuadratureOptions opt;
  opt.abs_tol = 1e-15;
  opt.max_depth = 2;
  const std::vector<double> part{0.0, 1.0};
  const auto r = integrate_partitioned<1>([](double x) { return std::array<double, 1>{std::sqrt(x)}; }, part, opt);
  CHECK_FALSE(r.converged);
}
