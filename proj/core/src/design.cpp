#include "kcross/design.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "kcross/errors.hpp"
#include "kcross/quadrature.hpp"
#include "kcross/text_format.hpp"

namespace kcross {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double golden_section_max(const std::function<double(double)>& g, double a, double b) {
  constexpr double r = 0.61803398874989484820;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  for (int i = 0; i < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (gc > gd) {
      b = d; d = c; gd = gc;
      c = b - r * (b - a); gc = g(c);
    } else {
      a = c; c = d; gc = gd;
      d = a + r * (b - a); gd = g(d);
    }
  }
  return std::max({gc, gd, g(0.5 * (a + b))});
}

}  // namespace

LimitDistribution::LimitDistribution(std::string name, Params params, Fn density, Fn cdf, Fn quantile,
                                     std::vector<double> kinks)
    : name_(std::move(name)),
      params_(std::move(params)),
      density_(std::move(density)),
      cdf_(std::move(cdf)),
      quantile_(std::move(quantile)),
      kinks_(std::move(kinks)) {
  if (!density_ || !cdf_) throw ConfigError("distribution '" + name_ + "' needs a density and a cdf");
  if (std::abs(cdf_(0.0)) > 1e-12 || std::abs(cdf_(1.0) - 1.0) > 1e-12)
    throw ConfigError("distribution '" + name_ + "': cdf must satisfy F(0)=0 and F(1)=1");
  constexpr int n = 4096;
  c_lo_ = std::numeric_limits<double>::infinity();
  c_hi_ = 0.0;
  double prev = cdf_(0.0);
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double dens = density_(t);
    if (!(dens > 0.0) || !std::isfinite(dens))
      throw ConfigError("distribution '" + name_ + "': density must be positive and finite on [0,1]");
    c_lo_ = std::min(c_lo_, dens);
    c_hi_ = std::max(c_hi_, dens);
    if (i > 0) {
      const double cur = cdf_(t);
      if (!(cur > prev)) throw ConfigError("distribution '" + name_ + "': cdf is not strictly increasing");
      prev = cur;
    }
  }
}

LimitDistribution LimitDistribution::uniform() {
  return LimitDistribution(
      "uniform", {}, [](double) { return 1.0; }, [](double t) { return std::clamp(t, 0.0, 1.0); },
      [](double u) { return std::clamp(u, 0.0, 1.0); });
}

LimitDistribution LimitDistribution::linear_density(double a, double b) {
  if (!(a > 0.0) || !(a + b > 0.0)) throw ConfigError("linear-density needs a > 0 and a + b > 0");
  const double mass = a + 0.5 * b;
  return LimitDistribution(
      "linear-density", {{"a", a}, {"b", b}}, [=](double t) { return (a + b * t) / mass; },
      [=](double t) {
        t = std::clamp(t, 0.0, 1.0);
        return (a * t + 0.5 * b * t * t) / mass;
      });
}

LimitDistribution LimitDistribution::truncated_normal(double mean, double sd) {
  if (!(sd > 0.0)) throw ConfigError("truncated-normal needs sd > 0");
  const double lo = normal_cdf((0.0 - mean) / sd);
  const double mass = normal_cdf((1.0 - mean) / sd) - lo;
  if (!(mass > 0.0)) throw ConfigError("truncated-normal has no mass on [0,1]");
  return LimitDistribution(
      "truncated-normal", {{"mean", mean}, {"sd", sd}},
      [=](double t) {
        const double z = (t - mean) / sd;
        return kInvSqrt2Pi * std::exp(-0.5 * z * z) / (sd * mass);
      },
      [=](double t) {
        t = std::clamp(t, 0.0, 1.0);
        if (t == 0.0) return 0.0;
        if (t == 1.0) return 1.0;
        return (normal_cdf((t - mean) / sd) - lo) / mass;
      });
}

LimitDistribution LimitDistribution::piecewise_linear(double knot, double left, double middle, double right) {
  if (!(knot > 0.0 && knot < 1.0)) throw ConfigError("piecewise-linear knot must lie in (0,1)");
  if (!(left > 0.0 && middle > 0.0 && right > 0.0)) throw ConfigError("piecewise-linear values must be positive");
  const double mass = 0.5 * knot * (left + middle) + 0.5 * (1.0 - knot) * (middle + right);
  auto raw = [=](double t) {
    if (t <= knot) return left + (middle - left) * t / knot;
    return middle + (right - middle) * (t - knot) / (1.0 - knot);
  };
  auto cdf = [=](double t) {
    t = std::clamp(t, 0.0, 1.0);
    if (t <= knot) return (left * t + 0.5 * (middle - left) * t * t / knot) / mass;
    const double s = t - knot;
    const double head = 0.5 * knot * (left + middle);
    return (head + middle * s + 0.5 * (right - middle) * s * s / (1.0 - knot)) / mass;
  };
  return LimitDistribution("piecewise-linear", {{"knot", knot}, {"left", left}, {"middle", middle}, {"right", right}},
                           [=](double t) { return raw(t) / mass; }, cdf, {}, {knot});
}

double LimitDistribution::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw PreconditionError("quantile argument must lie in [0,1]");
  if (quantile_) return quantile_(u);
  double lo = 0.0, hi = 1.0;
  if (cdf_(lo) > u || cdf_(hi) < u) throw ConfigError("distribution '" + name_ + "': cdf inversion failed");
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (cdf_(mid) < u)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Design::Design(std::vector<double> points, std::vector<double> weights, LimitDistribution dist)
    : points_(std::move(points)), weights_(std::move(weights)), dist_(std::move(dist)) {
  if (points_.empty()) throw PreconditionError("design needs at least one point");
  if (weights_.size() != points_.size()) throw PreconditionError("design weights and points differ in size");
  if (!std::is_sorted(points_.begin(), points_.end())) throw PreconditionError("design points must be sorted");
  if (points_.front() < 0.0 || points_.back() > 1.0) throw PreconditionError("design points must lie in [0,1]");
  for (double w : weights_)
    if (!(w > 0.0)) throw PreconditionError("design weights must be strictly positive");
}

double Design::weight_deviation() const {
  double dev = 0.0;
  for (double w : weights_) dev = std::max(dev, std::abs(w - 1.0));
  return dev;
}

Design regular_design(std::size_t n, const LimitDistribution& dist) {
  if (n == 0) throw PreconditionError("regular_design needs n >= 1");
  std::vector<double> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = dist.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  return Design(std::move(pts), std::vector<double>(n, 1.0), dist);
}

Design random_design(std::size_t n, const LimitDistribution& dist, std::uint64_t seed) {
  if (n == 0) throw PreconditionError("random_design needs n >= 1");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> pts(n);
  for (auto& p : pts) p = dist.quantile(unif(gen));
  std::sort(pts.begin(), pts.end());
  return Design(std::move(pts), std::vector<double>(n, 1.0), dist);
}

double star_discrepancy(std::span<const double> points, const LimitDistribution& dist) {
  std::vector<double> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end());
  const double n = static_cast<double>(pts.size());
  double sup = 0.0;
  std::size_t i = 0;
  while (i < pts.size()) {
    std::size_t j = i;
    while (j < pts.size() && pts[j] == pts[i]) ++j;
    const double f = dist.cdf(pts[i]);
    sup = std::max({sup, std::abs(static_cast<double>(i) / n - f), std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return sup;
}

double star_discrepancy(const Design& d) { return star_discrepancy(d.points(), d.distribution()); }

double total_variation(std::span<const double> samples) {
  double tv = 0.0;
  for (std::size_t j = 1; j < samples.size(); ++j) tv += std::abs(samples[j] - samples[j - 1]);
  return tv;
}

double total_variation(const std::function<double(double)>& g, double a, double b, std::size_t n) {
  if (n < 2) throw PreconditionError("total_variation needs at least two grid points");
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = g(a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1));
  return total_variation(v);
}

double total_variation_refined(const std::function<double(double)>& g, double a, double b, std::size_t n) {
  if (n < 3) throw PreconditionError("total_variation_refined needs at least three grid points");
  auto x = [&](std::size_t j) { return a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1); };
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = g(x(j));
  // Replace each discrete turning point by the refined extremum value.
  std::vector<double> path{v.front()};
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double d1 = v[j] - v[j - 1];
    const double d2 = v[j + 1] - v[j];
    if (d1 > 0.0 && d2 <= 0.0)
      path.push_back(golden_section_max(g, x(j - 1), x(j + 1)));
    else if (d1 < 0.0 && d2 >= 0.0)
      path.push_back(-golden_section_max([&](double t) { return -g(t); }, x(j - 1), x(j + 1)));
  }
  path.push_back(v.back());
  return total_variation(path);
}

KoksmaGap koksma_gap(const std::function<double(double)>& g, double g_tv, double g_sup, const Design& d,
                     double weight_const, std::span<const double> breakpoints) {
  const double disc = star_discrepancy(d);
  const double dev = d.weight_deviation();
  if (dev > weight_const * disc * (1.0 + 1e-12) + 1e-15) {
    std::ostringstream msg;
    msg << "koksma_gap: max|w_i - 1| = " << dev << " exceeds C*D* = " << weight_const * disc;
    throw PreconditionError(msg.str());
  }
  std::vector<double> bps(breakpoints.begin(), breakpoints.end());
  bps.insert(bps.end(), d.distribution().kinks().begin(), d.distribution().kinks().end());
  const LimitDistribution& dist = d.distribution();
  const Integral integral = integrate([&](double t) { return g(t) * dist.density(t); }, 0.0, 1.0, 1e-10, bps);
  if (!integral.converged) throw NumericError("koksma_gap: quadrature did not converge to 1e-10");
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) sum += g(d.points()[i]) * d.weights()[i];
  sum /= static_cast<double>(d.size());
  return {std::abs(integral.value - sum), (g_tv + weight_const * g_sup) * disc, integral.value, sum, disc,
          integral.error};
}

void write_design(std::ostream& os, const Design& d) {
  os << "# t w\n";
  for (std::size_t i = 0; i < d.size(); ++i) os << format_double(d.points()[i]) << ' ' << format_double(d.weights()[i]) << '\n';
}

Design read_design(std::istream& is, const LimitDistribution& dist) {
  std::vector<double> pts, ws;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double t = 0.0, w = 0.0;
    if (!(row >> t >> w)) throw ConfigError("design file line " + std::to_string(lineno) + ": expected 't w'");
    pts.push_back(t);
    ws.push_back(w);
  }
  return Design(std::move(pts), std::move(ws), dist);
}

}  // namespace kcross
