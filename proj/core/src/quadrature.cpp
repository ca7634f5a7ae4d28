#include "kcross/quadrature.hpp"

#include <algorithm>

namespace kcross {

namespace {

GaussRule build_gauss_legendre_15() {
  constexpr int n = 15;
  GaussRule rule{};
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    long double x = std::cos(3.14159265358979323846264338327950288L * (i + 0.75L) / (n + 0.5L));
    long double dp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(static_cast<double>(dx)) < 1e-19) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = static_cast<double>(x);
    rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(2.0L / ((1.0L - x * x) * dp * dp));
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre_15() {
  static const GaussRule rule = build_gauss_legendre_15();
  return rule;
}

std::vector<double> make_partition(double a, double b, std::span<const double> breakpoints) {
  std::vector<double> p;
  p.reserve(breakpoints.size() + 2);
  p.push_back(a);
  for (double x : breakpoints)
    if (x > a && x < b) p.push_back(x);
  p.push_back(b);
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

Integral integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                   std::span<const double> breakpoints) {
  const std::vector<double> part = make_partition(a, b, breakpoints);
  QuadratureOptions opt;
  opt.abs_tol = abs_tol;
  const auto r = integrate_partitioned<1>([&](double x) { return std::array<double, 1>{f(x)}; }, part, opt);
  return {r.value[0], r.error[0], r.evaluations, r.converged};
}

}  // namespace kcross
