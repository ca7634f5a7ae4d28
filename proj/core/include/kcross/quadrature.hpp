#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace kcross {

// 15-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::array<double, 15> nodes;
  std::array<double, 15> weights;
};
const GaussRule& gauss_legendre_15();

struct QuadratureOptions {
  double abs_tol = 1e-6;
  int max_depth = 48;
  std::size_t max_evaluations = 200'000'000;
};

template <std::size_t K>
struct QuadratureResult {
  std::array<double, K> value{};
  std::array<double, K> error{};
  std::size_t evaluations = 0;
  bool converged = true;
};

// Sorted, de-duplicated partition of [a, b] containing every breakpoint that
// falls strictly inside.
std::vector<double> make_partition(double a, double b, std::span<const double> breakpoints);

// Adaptive bisected Gauss-Legendre over each cell of `partition`. f maps a
// double to std::array<double, K>; all K components share evaluations and a
// panel is accepted once every component meets its share of abs_tol
// (proportional to panel width). The error estimate is the summed
// |whole - halves| of accepted panels.
template <std::size_t K, class F>
QuadratureResult<K> integrate_partitioned(F&& f, std::span<const double> partition,
                                          const QuadratureOptions& opt = {}) {
  QuadratureResult<K> out;
  if (partition.size() < 2) return out;
  const double total = partition.back() - partition.front();
  if (!(total > 0.0)) return out;

  const GaussRule& rule = gauss_legendre_15();
  auto panel = [&](double a, double b) {
    std::array<double, K> s{};
    const double c = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const std::array<double, K> v = f(c + r * rule.nodes[i]);
      for (std::size_t k = 0; k < K; ++k) s[k] += rule.weights[i] * v[k];
    }
    for (auto& x : s) x *= r;
    out.evaluations += rule.nodes.size();
    return s;
  };

  struct Item {
    double a, b;
    std::array<double, K> whole;
    int depth;
  };
  std::vector<Item> stack;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t cell = 0; cell + 1 < partition.size(); ++cell) {
    const double a0 = partition[cell];
    const double b0 = partition[cell + 1];
    if (!(b0 > a0)) continue;
    stack.push_back({a0, b0, panel(a0, b0), 0});
    while (!stack.empty()) {
      Item it = stack.back();
      stack.pop_back();
      const double mid = 0.5 * (it.a + it.b);
      const auto left = panel(it.a, mid);
      const auto right = panel(mid, it.b);
      const double local_tol = opt.abs_tol * (it.b - it.a) / total;
      bool accept = true;
      std::array<double, K> diff{};
      for (std::size_t k = 0; k < K; ++k) {
        const double halves = left[k] + right[k];
        diff[k] = std::abs(it.whole[k] - halves);
        if (!(diff[k] <= std::max(local_tol, 64.0 * eps * std::abs(halves)))) accept = false;
      }
      const bool exhausted = it.depth >= opt.max_depth || out.evaluations >= opt.max_evaluations ||
                             !(mid > it.a && mid < it.b);
      if (accept || exhausted) {
        if (!accept) out.converged = false;
        for (std::size_t k = 0; k < K; ++k) {
          out.value[k] += left[k] + right[k];
          out.error[k] += diff[k];
        }
      } else {
        stack.push_back({mid, it.b, right, it.depth + 1});
        stack.push_back({it.a, mid, left, it.depth + 1});
      }
    }
  }
  return out;
}

struct Integral {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

Integral integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                   std::span<const double> breakpoints = {});

}  // namespace kcross
