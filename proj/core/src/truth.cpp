#include "kcross/truth.hpp"

#include <cmath>
#include <numbers>

#include "kcross/errors.hpp"

namespace kcross {

namespace {

// Coefficients (ascending in L) of d^k/dx^k L(x) as a polynomial in L,
// using L' = L - L^2.
std::vector<std::vector<double>> logistic_derivative_polys(int kmax) {
  std::vector<std::vector<double>> polys{{0.0, 1.0}};
  for (int k = 1; k <= kmax; ++k) {
    const auto& p = polys.back();
    std::vector<double> dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t j = 1; j < p.size(); ++j) dp[j - 1] = p[j] * static_cast<double>(j);
    std::vector<double> next(dp.size() + 2, 0.0);
    for (std::size_t j = 0; j < dp.size(); ++j) {
      next[j + 1] += dp[j];
      next[j + 2] -= dp[j];
    }
    polys.push_back(std::move(next));
  }
  return polys;
}

double eval_poly(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

Truth::Truth(std::string name, Fn fn, int max_derivative)
    : name_(std::move(name)), fn_(std::move(fn)), max_derivative_(max_derivative) {
  if (!fn_) throw ConfigError("truth '" + name_ + "' has no function");
}

double Truth::derivative(double t, int k) const {
  if (k < 0 || k > max_derivative_)
    throw PreconditionError("truth '" + name_ + "' has no closed-form derivative of order " + std::to_string(k));
  return fn_(t, k);
}

Truth Truth::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  return Truth(
      "polynomial",
      [c = std::move(coeffs)](double t, int k) {
        double acc = 0.0;
        for (std::size_t j = c.size(); j-- > static_cast<std::size_t>(k);) {
          double fall = 1.0;
          for (int m = 0; m < k; ++m) fall *= static_cast<double>(j - static_cast<std::size_t>(m));
          acc = acc * t + c[j] * fall;
        }
        return acc;
      },
      64);
}

Truth Truth::sine(double amplitude, double cycles, double phase) {
  const double omega = 2.0 * std::numbers::pi * cycles;
  return Truth(
      "sine",
      [=](double t, int k) {
        return amplitude * std::pow(omega, k) * std::sin(omega * t + phase + 0.5 * std::numbers::pi * k);
      },
      64);
}

Truth Truth::logistic_bump(double amplitude, double rise, double fall, double width) {
  if (!(width > 0.0)) throw ConfigError("logistic-bump width must be positive");
  constexpr int kmax = 12;
  auto polys = logistic_derivative_polys(kmax);
  return Truth(
      "logistic-bump",
      [=, p = std::move(polys)](double t, int k) {
        auto logistic = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
        const double scale = std::pow(width, -k);
        const double a = eval_poly(p[static_cast<std::size_t>(k)], logistic((t - rise) / width));
        const double b = eval_poly(p[static_cast<std::size_t>(k)], logistic((t - fall) / width));
        return amplitude * scale * (a - b);
      },
      kmax);
}

std::vector<double> find_derivative_zeros(const Truth& f, int k, double a, double b, std::size_t n) {
  std::vector<double> zeros;
  auto g = [&](double t) { return f.derivative(t, k); };
  double x0 = a, g0 = g(a);
  if (g0 == 0.0) zeros.push_back(a);
  for (std::size_t j = 1; j < n; ++j) {
    const double x1 = a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1);
    const double g1 = g(x1);
    if (g1 == 0.0) {
      if (g0 == 0.0) throw PreconditionError("f^(" + std::to_string(k) + ") of '" + f.name() + "' vanishes on an interval");
      zeros.push_back(x1);
    } else if (g0 * g1 < 0.0) {
      double lo = x0, hi = x1, glo = g0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      zeros.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    g0 = g1;
  }
  return zeros;
}

}  // namespace kcross
