#include "kcross/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kcross/errors.hpp"

namespace kcross {

namespace {

PolyKernel checked_kernel(PolyKernel kernel, int order) {
  const KernelValidation v = validate_kernel(kernel, order);
  if (!v.ok()) {
    std::ostringstream msg;
    msg << "kernel fails validation for order " << order << ":";
    for (const auto& f : v.failures()) msg << ' ' << f.name << '=' << f.value;
    throw PreconditionError(msg.str());
  }
  return kernel;
}

}  // namespace

SmootherSpec::SmootherSpec(int order, double halfwidth, PolyKernel kernel, double noise_sd)
    : order_(order),
      h_(halfwidth),
      kernel_(checked_kernel(std::move(kernel), order)),
      noise_sd_(noise_sd),
      d_kernel_(kernel_.polynomial().derivative(order), order),
      dd_kernel_(kernel_.polynomial().derivative(order + 1), order) {
  if (!(h_ > 0.0 && h_ < 0.5)) throw PreconditionError("halfwidth must lie in (0, 1/2)");
  if (!(noise_sd_ > 0.0)) throw PreconditionError("noise sd must be positive");
}

SmootherSpec::SmootherSpec(int order, double halfwidth, double noise_sd)
    : SmootherSpec(order, halfwidth, make_smoothing_kernel(order), noise_sd) {}

KernelSmoother::KernelSmoother(SmootherSpec spec, Design design) {
  const double h = spec.halfwidth();
  const int l = spec.order();
  const double n = static_cast<double>(design.size());
  std::vector<double> scale(design.size());
  for (std::size_t i = 0; i < design.size(); ++i)
    scale[i] = design.weights()[i] / (n * design.distribution().density(design.points()[i]));
  const double inv_l1 = std::pow(h, -(l + 1));
  const double inv_l2 = std::pow(h, -(l + 2));
  state_ = std::make_shared<const State>(State{std::move(spec), std::move(design), std::move(scale), inv_l1, inv_l2});
}

void KernelSmoother::check_domain(double t) const {
  const double h = spec().halfwidth();
  if (!(t >= h - 1e-12 && t <= 1.0 - h + 1e-12)) {
    std::ostringstream msg;
    msg << "t = " << t << " lies outside the interior interval [" << h << ", " << 1.0 - h << "]";
    throw DomainError(msg.str());
  }
}

std::pair<std::size_t, std::size_t> KernelSmoother::support_range(double t) const {
  const auto& pts = design().points();
  const double h = spec().halfwidth();
  const auto lo = std::lower_bound(pts.begin(), pts.end(), t - h);
  const auto hi = std::upper_bound(lo, pts.end(), t + h);
  return {static_cast<std::size_t>(lo - pts.begin()), static_cast<std::size_t>(hi - pts.begin())};
}

CoefficientVectors KernelSmoother::coefficients(double t) const {
  check_domain(t);
  const auto [lo, hi] = support_range(t);
  const double h = spec().halfwidth();
  const auto& pts = design().points();
  CoefficientVectors cv;
  cv.first = lo;
  cv.a.resize(hi - lo);
  cv.da.resize(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    const double u = (t - pts[i]) / h;
    cv.a[i - lo] = state_->scale[i] * state_->inv_h_l1 * spec().estimator_kernel()(u);
    cv.da[i - lo] = state_->scale[i] * state_->inv_h_l2 * spec().derivative_kernel()(u);
  }
  return cv;
}

double KernelSmoother::estimate(std::span<const double> y, double t) const {
  if (y.size() != design().size()) throw PreconditionError("response count does not match the design size");
  const CoefficientVectors cv = coefficients(t);
  double acc = 0.0;
  for (std::size_t k = 0; k < cv.a.size(); ++k) acc += cv.a[k] * y[cv.first + k];
  return acc;
}

double KernelSmoother::estimate_derivative(std::span<const double> y, double t) const {
  if (y.size() != design().size()) throw PreconditionError("response count does not match the design size");
  const CoefficientVectors cv = coefficients(t);
  double acc = 0.0;
  for (std::size_t k = 0; k < cv.da.size(); ++k) acc += cv.da[k] * y[cv.first + k];
  return acc;
}

PointMoments KernelSmoother::moments(double t, std::span<const double> fvals) const {
  const auto [lo, hi] = support_range(t);
  const double h = spec().halfwidth();
  const auto& pts = design().points();
  const auto& scale = state_->scale;
  const PolyKernel& k0 = spec().estimator_kernel();
  const PolyKernel& k1 = spec().derivative_kernel();
  double m = 0.0, dm = 0.0, saa = 0.0, sdd = 0.0, sad = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double u = (t - pts[i]) / h;
    const double a = scale[i] * k0(u);
    const double d = scale[i] * k1(u);
    m += a * fvals[i];
    dm += d * fvals[i];
    saa += a * a;
    sdd += d * d;
    sad += a * d;
  }
  const double c0 = state_->inv_h_l1;
  const double c1 = state_->inv_h_l2;
  const double sd = spec().noise_sd();
  PointMoments p;
  p.m = c0 * m;
  p.dm = c1 * dm;
  p.sigma = sd * c0 * std::sqrt(saa);
  p.xi = sd * c1 * std::sqrt(sdd);
  const double denom = std::sqrt(saa * sdd);
  p.mu = denom > 0.0 ? sad / denom : 0.0;
  return p;
}

std::vector<double> KernelSmoother::breakpoints(double a, double b) const {
  const double h = spec().halfwidth();
  std::vector<double> out;
  for (double t : design().points()) {
    for (double x : {t - h, t + h})
      if (x > a && x < b) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> KernelSmoother::default_grid() const {
  const double h = spec().halfwidth();
  const std::size_t n = std::max<std::size_t>(2048, static_cast<std::size_t>(std::ceil(50.0 / h)));
  std::vector<double> grid(n);
  for (std::size_t j = 0; j < n; ++j) grid[j] = h + (1.0 - 2.0 * h) * static_cast<double>(j) / static_cast<double>(n - 1);
  grid.back() = 1.0 - h;
  return grid;
}

GPMoments KernelSmoother::gp_moments(const Truth& f) const { return gp_moments(f, default_grid()); }

GPMoments KernelSmoother::gp_moments(const Truth& f, std::vector<double> grid) const {
  if (grid.empty()) throw PreconditionError("gp_moments needs a nonempty grid");
  check_domain(grid.front());
  check_domain(grid.back());
  auto fvals = std::make_shared<std::vector<double>>(design().size());
  for (std::size_t i = 0; i < design().size(); ++i) (*fvals)[i] = f(design().points()[i]);
  KernelSmoother self = *this;
  auto eval = [self, fvals](double t) { return self.moments(t, *fvals); };
  std::vector<double> bps = breakpoints(grid.front(), grid.back());
  return GPMoments::from_function(std::move(eval), std::move(grid), std::move(bps));
}

AsymptoticMoments asymptotic_moments(const SmootherSpec& spec, const LimitDistribution& dist, std::size_t n, double t) {
  const double h = spec.halfwidth();
  const int l = spec.order();
  if (!(t >= h - 1e-12 && t <= 1.0 - h + 1e-12)) throw DomainError("asymptotic_moments: t outside [h, 1-h]");
  const double base = spec.noise_sd() * spec.noise_sd() / (static_cast<double>(n) * dist.density(t));
  const double var = base * spec.estimator_kernel().l2_norm_sq() / std::pow(h, 2 * l + 1);
  const double dvar = base * spec.derivative_kernel().l2_norm_sq() / std::pow(h, 2 * l + 3);
  return {std::sqrt(var), std::sqrt(dvar)};
}

}  // namespace kcross
