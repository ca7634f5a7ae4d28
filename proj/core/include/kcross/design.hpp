#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kcross {

// Limiting distribution F of the measurement locations on [0, 1], with
// density bounds 0 < c_F <= F' <= C_F.
class LimitDistribution {
 public:
  using Fn = std::function<double(double)>;
  using Params = std::vector<std::pair<std::string, double>>;

  // Checks F(0) = 0, F(1) = 1, monotonicity and the density bounds on a
  // dense grid; throws ConfigError otherwise. `quantile` may be empty, in
  // which case the cdf is inverted by bisection.
  LimitDistribution(std::string name, Params params, Fn density, Fn cdf, Fn quantile = {},
                    std::vector<double> kinks = {});

  static LimitDistribution uniform();
  // Density proportional to a + b t.
  static LimitDistribution linear_density(double a, double b);
  // Normal(mean, sd) truncated to [0, 1].
  static LimitDistribution truncated_normal(double mean, double sd);
  // Continuous piecewise-linear density through (0, left), (knot, middle), (1, right),
  // normalized. F' has a kink at `knot`.
  static LimitDistribution piecewise_linear(double knot, double left, double middle, double right);

  const std::string& name() const { return name_; }
  const Params& params() const { return params_; }
  double density(double t) const { return density_(t); }
  double cdf(double t) const { return cdf_(t); }
  // Bisection to 1e-14 unless a closed form was supplied.
  double quantile(double u) const;
  double density_lower() const { return c_lo_; }
  double density_upper() const { return c_hi_; }
  // Points where F' is not smooth (split points for quadrature).
  const std::vector<double>& kinks() const { return kinks_; }

 private:
  std::string name_;
  Params params_;
  Fn density_, cdf_, quantile_;
  std::vector<double> kinks_;
  double c_lo_ = 0.0, c_hi_ = 0.0;
};

// Measurement design: sorted locations in [0, 1] with positive weights.
class Design {
 public:
  Design(std::vector<double> points, std::vector<double> weights, LimitDistribution dist);

  std::size_t size() const { return points_.size(); }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const LimitDistribution& distribution() const { return dist_; }

  // max_i |w_i - 1|
  double weight_deviation() const;

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  LimitDistribution dist_;
};

// t_i = F^{-1}((i - 1/2)/n), i = 1..n, unit weights.
Design regular_design(std::size_t n, const LimitDistribution& dist);
// t_i = F^{-1}(U_i) with U_i from mt19937_64(seed), sorted, unit weights.
Design random_design(std::size_t n, const LimitDistribution& dist, std::uint64_t seed);

// sup_t |F_N(t) - F(t)| evaluated at both one-sided limits of every jump. The
// point order does not matter.
double star_discrepancy(std::span<const double> points, const LimitDistribution& dist);
double star_discrepancy(const Design& d);

// Sum of |g_{j+1} - g_j|: a lower bound on the true total variation.
double total_variation(std::span<const double> samples);
double total_variation(const std::function<double(double)>& g, double a, double b, std::size_t n);
// Grid total variation with every interior turning point refined by
// golden-section search. Exact when the grid brackets all turning points.
double total_variation_refined(const std::function<double(double)>& g, double a, double b, std::size_t n);

struct KoksmaGap {
  double lhs;             // |int g dF - (1/N) sum g(t_i) w_i|
  double bound;           // (||g||_TV + C ||g||_inf) D*_N
  double integral;
  double weighted_sum;
  double discrepancy;
  double quadrature_error;
};

// Throws PreconditionError when max|w_i - 1| > weight_const * D*_N and
// NumericError if the integral does not converge to 1e-10.
KoksmaGap koksma_gap(const std::function<double(double)>& g, double g_tv, double g_sup, const Design& d,
                     double weight_const, std::span<const double> breakpoints = {});

// Columnar text: "# t w" header then one "t w" row per point.
void write_design(std::ostream& os, const Design& d);
Design read_design(std::istream& is, const LimitDistribution& dist);

}  // namespace kcross
