#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace kcross {

using Rational = boost::multiprecision::cpp_rational;

// Polynomial with exact rational coefficients in the monomial basis,
// coeffs()[k] multiplying s^k. Trailing zero coefficients are trimmed.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs);

  // (1 - s^2)^n
  static Polynomial one_minus_square_pow(int n);

  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  Polynomial derivative(int j = 1) const;
  Polynomial antiderivative() const;
  Rational integrate(const Rational& a, const Rational& b) const;
  Rational operator()(const Rational& x) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(const Rational& scale) const;
  bool operator==(const Polynomial& other) const = default;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

// Polynomial kernel supported on [-1, 1]. Coefficients are exact; evaluation
// uses a cached double copy.
class PolyKernel {
 public:
  PolyKernel(Polynomial poly, int order);

  const Polynomial& polynomial() const { return poly_; }
  // Smoothing order l the kernel was built for.
  int order() const { return order_; }
  int degree() const { return poly_.degree(); }

  PolyKernel derivative(int j) const;

  // Zero for |s| > 1.
  double operator()(double s) const {
    return (s < -1.0 || s > 1.0) ? 0.0 : eval_polynomial(s);
  }
  // Horner evaluation ignoring the support; for callers that already
  // restricted s to [-1, 1].
  double eval_polynomial(double s) const {
    double acc = 0.0;
    for (auto it = fcoeffs_.rbegin(); it != fcoeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
  }
  std::span<const double> float_coeffs() const { return fcoeffs_; }

  // int_{-1}^{1} s^k kappa(s) ds
  Rational moment(int k) const;
  Rational l2_norm_sq_exact() const;
  double l2_norm_sq() const;

  bool operator==(const PolyKernel& other) const {
    return order_ == other.order_ && poly_ == other.poly_;
  }

 private:
  Polynomial poly_;
  int order_;
  std::vector<double> fcoeffs_;
};

// c_l (1 - s^2)^{l+1} with c_l chosen so the kernel integrates to one.
PolyKernel make_smoothing_kernel(int order);
// Normalized (1 - s^2)^power for smoothing order `order`; power >= order + 1.
// power = order + 2 keeps kappa^{(order+1)} continuous at the support ends.
PolyKernel make_power_kernel(int order, int power);

inline PolyKernel derivative(const PolyKernel& k, int j) { return k.derivative(j); }
inline double evaluate(const PolyKernel& k, double s) { return k(s); }
inline double l2_norm_sq(const PolyKernel& k) { return k.l2_norm_sq(); }

struct KernelCheck {
  std::string name;
  Rational value;     // the quantity that must vanish
  bool passed;
  bool required;      // false for informational checks (first moment)
};

struct KernelValidation {
  std::vector<KernelCheck> checks;

  bool ok() const;
  std::vector<KernelCheck> failures() const;
  bool symmetric_first_moment() const;
};

// Checks int kappa = 1, kappa^{(j)}(+-1) = 0 for 0 <= j <= order, and reports
// the first moment. All in exact arithmetic; never throws for a bad kernel.
KernelValidation validate_kernel(const PolyKernel& k, int order);

// {"order": l, "coefficients": [[num, den], ...]} in ascending powers.
std::string kernel_to_json(const PolyKernel& k);
PolyKernel kernel_from_json(std::string_view text);

double to_double(const Rational& r);

}  // namespace kcross
