#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "kcross/design.hpp"
#include "kcross/gp_moments.hpp"
#include "kcross/kernels.hpp"
#include "kcross/truth.hpp"

namespace kcross {

// Derivative order l, halfwidth h in (0, 1/2), kernel, noise sd.
class SmootherSpec {
 public:
  // Throws PreconditionError unless validate_kernel(kernel, order) passes,
  // 0 < h < 1/2 and noise_sd > 0.
  SmootherSpec(int order, double halfwidth, PolyKernel kernel, double noise_sd);
  // Uses make_smoothing_kernel(order).
  SmootherSpec(int order, double halfwidth, double noise_sd);

  int order() const { return order_; }
  double halfwidth() const { return h_; }
  double noise_sd() const { return noise_sd_; }
  const PolyKernel& kernel() const { return kernel_; }
  // kappa^{(l)} and kappa^{(l+1)}
  const PolyKernel& estimator_kernel() const { return d_kernel_; }
  const PolyKernel& derivative_kernel() const { return dd_kernel_; }

  SmootherSpec with_halfwidth(double h) const { return {order_, h, kernel_, noise_sd_}; }
  SmootherSpec with_noise_sd(double sd) const { return {order_, h_, kernel_, sd}; }

 private:
  int order_;
  double h_;
  PolyKernel kernel_;
  double noise_sd_;
  PolyKernel d_kernel_;
  PolyKernel dd_kernel_;
};

// Z(t) = sum_i a_i(t) y_i and Z'(t) = sum_i da_i(t) y_i; entries cover
// design indices [first, first + a.size()).
struct CoefficientVectors {
  std::size_t first = 0;
  std::vector<double> a;
  std::vector<double> da;
};

// The estimator
//   fhat^{(l)}(t) = 1/(N h^{l+1}) sum_i y_i w_i / F'(t_i) kappa^{(l)}((t - t_i)/h)
// bound to one design. Cheap to copy.
class KernelSmoother {
 public:
  KernelSmoother(SmootherSpec spec, Design design);

  const SmootherSpec& spec() const { return state_->spec; }
  const Design& design() const { return state_->design; }
  // Interior interval [h, 1 - h].
  double interior_lo() const { return state_->spec.halfwidth(); }
  double interior_hi() const { return 1.0 - state_->spec.halfwidth(); }

  // Throws DomainError for t outside [h, 1 - h].
  CoefficientVectors coefficients(double t) const;
  double estimate(std::span<const double> y, double t) const;
  double estimate_derivative(std::span<const double> y, double t) const;

  // Exact moments of Z(t) for responses y_i = f(t_i) + N(0, sd^2);
  // fvals[i] = f(t_i).
  PointMoments moments(double t, std::span<const double> fvals) const;

  // Points t_i +- h inside (a, b): kappa^{(l+1)} jumps there, so Z' and the
  // moments are only piecewise smooth.
  std::vector<double> breakpoints(double a, double b) const;
  // max(2048, ceil(50/h)) equispaced points on [h, 1 - h].
  std::vector<double> default_grid() const;

  GPMoments gp_moments(const Truth& f) const;
  GPMoments gp_moments(const Truth& f, std::vector<double> grid) const;

  // Hot-loop access used by the simulator.
  std::pair<std::size_t, std::size_t> support_range(double t) const;
  // w_i / (N F'(t_i))
  const std::vector<double>& point_scale() const { return state_->scale; }
  double coefficient_factor() const { return state_->inv_h_l1; }
  double derivative_factor() const { return state_->inv_h_l2; }

 private:
  struct State {
    SmootherSpec spec;
    Design design;
    std::vector<double> scale;
    double inv_h_l1;
    double inv_h_l2;
  };
  void check_domain(double t) const;
  std::shared_ptr<const State> state_;
};

inline CoefficientVectors coefficient_vectors(const SmootherSpec& spec, const Design& d, double t) {
  return KernelSmoother(spec, d).coefficients(t);
}
inline double estimate(const SmootherSpec& spec, const Design& d, std::span<const double> y, double t) {
  return KernelSmoother(spec, d).estimate(y, t);
}
inline GPMoments gp_moments(const SmootherSpec& spec, const Design& d, const Truth& f, std::vector<double> grid) {
  return KernelSmoother(spec, d).gp_moments(f, std::move(grid));
}

struct AsymptoticMoments {
  double sigma;
  double xi;
};

// Leading terms
//   sigma^2 = sd^2 ||kappa^{(l)}||^2   / (N F'(t) h^{2l+1})
//   xi^2    = sd^2 ||kappa^{(l+1)}||^2 / (N F'(t) h^{2l+3})
AsymptoticMoments asymptotic_moments(const SmootherSpec& spec, const LimitDistribution& dist, std::size_t n, double t);

}  // namespace kcross
