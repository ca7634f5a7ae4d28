#include "kcross/kernels.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "kcross/errors.hpp"

namespace kcross {

namespace {

using boost::multiprecision::cpp_int;

nlohmann::json integer_to_json(const cpp_int& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(v);
  return v.str();
}

cpp_int integer_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return cpp_int(j.get<std::int64_t>());
  if (j.is_string()) return cpp_int(j.get<std::string>());
  throw ConfigError("kernel coefficient must be an integer or a decimal string");
}

}  // namespace

double to_double(const Rational& r) { return r.convert_to<double>(); }

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Polynomial Polynomial::one_minus_square_pow(int n) {
  Polynomial base(std::vector<Rational>{1, 0, -1});
  Polynomial result(std::vector<Rational>{1});
  for (int i = 0; i < n; ++i) result = result * base;
  return result;
}

Polynomial Polynomial::derivative(int j) const {
  std::vector<Rational> c = coeffs_;
  for (int step = 0; step < j; ++step) {
    if (c.empty()) break;
    std::vector<Rational> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<int>(k);
    c = std::move(d);
  }
  return Polynomial(std::move(c));
}

Polynomial Polynomial::antiderivative() const {
  std::vector<Rational> c(coeffs_.size() + 1);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k + 1] = coeffs_[k] / static_cast<int>(k + 1);
  return Polynomial(std::move(c));
}

Rational Polynomial::integrate(const Rational& a, const Rational& b) const {
  const Polynomial anti = antiderivative();
  return anti(b) - anti(a);
}

Rational Polynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  std::vector<Rational> c(std::max(coeffs_.size(), other.coeffs_.size()));
  for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] += coeffs_[k];
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) c[k] += other.coeffs_[k];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other * Rational(-1); }

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (is_zero() || other.is_zero()) return Polynomial();
  std::vector<Rational> c(coeffs_.size() + other.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * other.coeffs_[j];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(const Rational& scale) const {
  std::vector<Rational> c = coeffs_;
  for (auto& v : c) v *= scale;
  return Polynomial(std::move(c));
}

PolyKernel::PolyKernel(Polynomial poly, int order) : poly_(std::move(poly)), order_(order) {
  if (order < 0) throw PreconditionError("kernel order must be nonnegative");
  fcoeffs_.reserve(poly_.coeffs().size());
  for (const auto& c : poly_.coeffs()) fcoeffs_.push_back(to_double(c));
}

PolyKernel PolyKernel::derivative(int j) const {
  if (j < 0) throw PreconditionError("derivative order must be nonnegative");
  if (j > std::max(degree(), 0))
    throw PreconditionError("derivative order " + std::to_string(j) + " exceeds kernel degree " +
                            std::to_string(degree()));
  return PolyKernel(poly_.derivative(j), order_);
}

Rational PolyKernel::moment(int k) const {
  std::vector<Rational> mono(static_cast<std::size_t>(k) + 1);
  mono[static_cast<std::size_t>(k)] = 1;
  return (poly_ * Polynomial(std::move(mono))).integrate(-1, 1);
}

Rational PolyKernel::l2_norm_sq_exact() const { return (poly_ * poly_).integrate(-1, 1); }

double PolyKernel::l2_norm_sq() const { return to_double(l2_norm_sq_exact()); }

PolyKernel make_power_kernel(int order, int power) {
  if (order < 0) throw PreconditionError("smoothing order must be nonnegative");
  if (power < order + 1) throw PreconditionError("kernel power must be at least order + 1");
  const Polynomial base = Polynomial::one_minus_square_pow(power);
  const Rational mass = base.integrate(-1, 1);
  return PolyKernel(base * (Rational(1) / mass), order);
}

PolyKernel make_smoothing_kernel(int order) {
  if (order < 0) throw PreconditionError("smoothing order must be nonnegative");
  return make_power_kernel(order, order + 1);
}

bool KernelValidation::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const KernelCheck& c) { return c.passed || !c.required; });
}

std::vector<KernelCheck> KernelValidation::failures() const {
  std::vector<KernelCheck> out;
  std::copy_if(checks.begin(), checks.end(), std::back_inserter(out),
               [](const KernelCheck& c) { return !c.passed && c.required; });
  return out;
}

bool KernelValidation::symmetric_first_moment() const {
  auto it = std::find_if(checks.begin(), checks.end(), [](const KernelCheck& c) { return c.name == "first_moment"; });
  return it != checks.end() && it->passed;
}

KernelValidation validate_kernel(const PolyKernel& k, int order) {
  KernelValidation report;
  const Polynomial& p = k.polynomial();

  const Rational mass_gap = p.integrate(-1, 1) - 1;
  report.checks.push_back({"moment", mass_gap, mass_gap == 0, true});

  const Rational first = k.moment(1);
  report.checks.push_back({"first_moment", first, first == 0, false});

  for (int j = 0; j <= order; ++j) {
    const Polynomial d = p.derivative(j);
    for (int side : {-1, 1}) {
      const Rational v = d(Rational(side));
      std::ostringstream name;
      name << "boundary_d" << j << (side < 0 ? "_at_-1" : "_at_+1");
      report.checks.push_back({name.str(), v, v == 0, true});
    }
  }
  return report;
}

std::string kernel_to_json(const PolyKernel& k) {
  nlohmann::json j;
  j["order"] = k.order();
  auto coeffs = nlohmann::json::array();
  for (const auto& c : k.polynomial().coeffs())
    coeffs.push_back({integer_to_json(boost::multiprecision::numerator(c)),
                      integer_to_json(boost::multiprecision::denominator(c))});
  j["coefficients"] = std::move(coeffs);
  return j.dump();
}

PolyKernel kernel_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("kernel json: ") + e.what());
  }
  if (!j.contains("order") || !j.contains("coefficients"))
    throw ConfigError("kernel json needs 'order' and 'coefficients'");
  std::vector<Rational> coeffs;
  for (const auto& pair : j.at("coefficients")) {
    if (!pair.is_array() || pair.size() != 2) throw ConfigError("kernel coefficient must be a [num, den] pair");
    const cpp_int den = integer_from_json(pair[1]);
    if (den == 0) throw ConfigError("kernel coefficient with zero denominator");
    coeffs.emplace_back(integer_from_json(pair[0]), den);
  }
  return PolyKernel(Polynomial(std::move(coeffs)), j.at("order").get<int>());
}

}  // namespace kcross
