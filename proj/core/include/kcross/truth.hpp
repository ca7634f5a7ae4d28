#pragma once

#include <functional>
#include <string>
#include <vector>

namespace kcross {

// Regression function f on [0, 1] with closed-form derivatives.
class Truth {
 public:
  // fn(t, k) returns f^{(k)}(t) for 0 <= k <= max_derivative.
  using Fn = std::function<double(double, int)>;

  Truth(std::string name, Fn fn, int max_derivative);

  // sum_k c_k t^k
  static Truth polynomial(std::vector<double> coeffs);
  // amplitude * sin(2 pi cycles t + phase)
  static Truth sine(double amplitude, double cycles, double phase = 0.0);
  // amplitude * [L((t - rise)/width) - L((t - fall)/width)], L the logistic function.
  static Truth logistic_bump(double amplitude, double rise, double fall, double width);
  static Truth zero() { return polynomial({0.0}); }

  const std::string& name() const { return name_; }
  int max_derivative() const { return max_derivative_; }
  double operator()(double t) const { return fn_(t, 0); }
  double derivative(double t, int k) const;

 private:
  std::string name_;
  Fn fn_;
  int max_derivative_;
};

// Zeros of f^{(k)} on [a, b]: sign changes on an n-point grid refined by
// bisection. Zeros without a sign change (tangencies) are not reported;
// PreconditionError if f^{(k)} is zero on two neighbouring grid nodes.
std::vector<double> find_derivative_zeros(const Truth& f, int k, double a, double b, std::size_t n = 4096);

}  // namespace kcross
