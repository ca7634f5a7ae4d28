#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kcross/design.hpp"
#include "kcross/smoother.hpp"
#include "kcross/truth.hpp"

namespace kcross {

// Truth f with l-change points x_k (zeros of f^{(l)} with f^{(l+1)}(x_k) != 0),
// observed through a smoother at n points drawn from `dist`.
//
// Construction throws DegenerateChangePointError if |f^{(l+1)}(x_k)| <= 1e-8,
// and PreconditionError if some x_k is not a zero of f^{(l)} or if f^{(l)}
// vanishes at h or 1 - h. f^{(l)}(0) = 0 or f^{(l)}(1) = 0 only adds a
// warning, since those points lie outside the estimation region.
class ChangePointProblem {
 public:
  ChangePointProblem(Truth f, std::vector<double> change_points, SmootherSpec spec, LimitDistribution dist,
                     std::size_t n);

  const Truth& truth() const { return f_; }
  const std::vector<double>& change_points() const { return x_; }
  std::size_t size() const { return x_.size(); }
  int order() const { return spec_.order(); }
  const SmootherSpec& spec() const { return spec_; }
  const LimitDistribution& distribution() const { return dist_; }
  std::size_t n() const { return n_; }
  // f^{(l+1)}(x_k)
  double slope(std::size_t k) const { return slopes_.at(k); }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  Truth f_;
  std::vector<double> x_;
  SmootherSpec spec_;
  LimitDistribution dist_;
  std::size_t n_;
  std::vector<double> slopes_;
  std::vector<std::string> warnings_;
};

// sigma_if(x_k)^2 = sd^2 ||kappa^{(l)}||^2 / (f^{(l+1)}(x_k)^2 N F'(x_k) h^{2l+1})
double sigma_if(const ChangePointProblem& p, std::size_t k);
// sigma_N(x_k) / |f^{(l+1)}(x_k)| with the finite-sample sd of Z(x_k).
double sigma_if_exact(const ChangePointProblem& p, const KernelSmoother& sm, std::size_t k);

struct TailBound {
  double value = 0.0;
  std::vector<double> per_point;
  bool order_term = true;  // O(.) bound evaluated with constant 1
  std::vector<std::string> warnings;
};

// sum_k (sigma_if(x_k)/h) exp(-w^2 / (2 sigma_if(x_k)^2)). Hypothesis
// violations (w^2 N h^{2l+1} < 1 for some k, h/w > 1/2) become warnings.
TailBound tail_bound(const ChangePointProblem& p, double w);

struct FalseChangePoints {
  double excess = 0.0;        // 2 sum_k H(z_k)
  std::vector<double> z;      // arguments of H
  std::vector<double> h_values;
  double rate_constant = 0.0; // h N^{1/(2l+3)}
  bool order_term = false;
  std::vector<std::string> warnings;
};

// z_k = |f^{(l+1)}(x_k)| sqrt(N F'(x_k) h^{2l+3}) / (sd ||kappa^{(l+1)}||).
// Throws PreconditionError when the kernel's first moment is nonzero.
FalseChangePoints expected_false_changepoints(const ChangePointProblem& p);

struct PilotHalfwidth {
  double value = 0.0;
  double unclamped = 0.0;
  bool clamped = false;
  std::string warning;
};

// Largest halfwidth returned; values above it are clamped with a warning.
inline constexpr double kPilotHalfwidthCap = 0.45;

// safety * ln(n) * n^{-1/(2l+3)}, clamped into (0, 1/2).
PilotHalfwidth pilot_halfwidth(int order, std::size_t n, double safety = 1.0);

// x_k, f^{(l+1)}(x_k), sigma_if, z_k, H(z_k)
void write_changepoint_header(std::ostream& os);
void write_changepoint_rows(std::ostream& os, const ChangePointProblem& p);

}  // namespace kcross
