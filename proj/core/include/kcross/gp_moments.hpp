#pragma once

#include <cmath>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace kcross {

// Same-point moments of a differentiable Gaussian process Z at one time:
// m = E[Z], dm = m', sigma = sd(Z), xi = sd(Z'), mu = Corr[Z, Z'].
struct PointMoments {
  double m = 0.0;
  double dm = 0.0;
  double sigma = 1.0;
  double xi = 1.0;
  double mu = 0.0;

  double gamma() const { return std::sqrt(std::max(0.0, (1.0 - mu) * (1.0 + mu))); }
  double eta() const { return (dm - xi * mu * m / sigma) / (xi * gamma()); }
  // Standardized mean M = m / sigma and its derivative. sigma' = mu xi, so
  // M' = (m' - m mu xi / sigma) / sigma = xi gamma eta / sigma.
  double M() const { return m / sigma; }
  double dM() const { return (dm - m * mu * xi / sigma) / sigma; }
};

// Moment profile of Z on a grid over [grid.front(), grid.back()].
//
// Off-grid values come from the exact evaluator when one is attached (the
// kernel smoother attaches one), otherwise from monotone cubic (PCHIP)
// interpolation of m, m', sigma, xi, mu. `breakpoints` lists interior points
// where the moments are only piecewise smooth; integrators split there.
class GPMoments {
 public:
  using Evaluator = std::function<PointMoments(double)>;

  // Samples `eval` on `grid` and keeps it for off-grid queries.
  static GPMoments from_function(Evaluator eval, std::vector<double> grid, std::vector<double> breakpoints = {});
  // Equispaced convenience overload.
  static GPMoments from_function(Evaluator eval, double a, double b, std::size_t n,
                                 std::vector<double> breakpoints = {});
  static GPMoments from_samples(std::vector<double> grid, std::vector<double> m, std::vector<double> dm,
                                std::vector<double> sigma, std::vector<double> xi, std::vector<double> mu);

  PointMoments at(double s) const;
  PointMoments at_node(std::size_t j) const { return {m_[j], dm_[j], sigma_[j], xi_[j], mu_[j]}; }
  bool has_exact_evaluator() const { return static_cast<bool>(eval_); }

  std::size_t size() const { return grid_.size(); }
  double lo() const { return grid_.front(); }
  double hi() const { return grid_.back(); }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& m() const { return m_; }
  const std::vector<double>& dm() const { return dm_; }
  const std::vector<double>& sigma() const { return sigma_; }
  const std::vector<double>& xi() const { return xi_; }
  const std::vector<double>& mu() const { return mu_; }
  std::vector<double> gamma() const;
  std::vector<double> eta() const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  // Columns: grid m sigma xi mu eta (header line starting with '#').
  void write_columns(std::ostream& os) const;
  // Inverse of write_columns; m' is recovered from eta.
  static GPMoments read_columns(std::istream& is);

 private:
  GPMoments() = default;
  void validate() const;
  void build_interpolant();

  std::vector<double> grid_, m_, dm_, sigma_, xi_, mu_;
  std::vector<double> breakpoints_;
  Evaluator eval_;
  struct Interp;
  std::shared_ptr<const Interp> interp_;
};

}  // namespace kcross
