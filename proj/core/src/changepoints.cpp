#include "kcross/changepoints.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "kcross/crossings.hpp"
#include "kcross/errors.hpp"
#include "kcross/text_format.hpp"

namespace kcross {

ChangePointProblem::ChangePointProblem(Truth f, std::vector<double> change_points, SmootherSpec spec,
                                       LimitDistribution dist, std::size_t n)
    : f_(std::move(f)), x_(std::move(change_points)), spec_(std::move(spec)), dist_(std::move(dist)), n_(n) {
  const int l = spec_.order();
  if (f_.max_derivative() < l + 1) throw PreconditionError("truth '" + f_.name() + "' lacks derivative l + 1");
  if (n_ < 2) throw PreconditionError("change-point problem needs n >= 2");
  std::sort(x_.begin(), x_.end());
  for (double x : x_) {
    if (!(x > 0.0 && x < 1.0)) throw PreconditionError("change points must lie in (0, 1)");
    const double s = f_.derivative(x, l + 1);
    if (!(std::abs(s) > 1e-8)) {
      std::ostringstream msg;
      msg << "degenerate change point at x = " << x << ": f^(" << l + 1 << ") = " << s;
      throw DegenerateChangePointError(msg.str());
    }
    const double v = f_.derivative(x, l);
    if (std::abs(v) > 1e-8 * std::max(1.0, std::abs(s))) {
      std::ostringstream msg;
      msg << "x = " << x << " is not a zero of f^(" << l << "): value " << v;
      throw PreconditionError(msg.str());
    }
    slopes_.push_back(s);
  }
  const double h = spec_.halfwidth();
  for (double t : {h, 1.0 - h}) {
    if (std::abs(f_.derivative(t, l)) <= 1e-12) {
      std::ostringstream msg;
      msg << "f^(" << l << ") vanishes at the estimation boundary t = " << t;
      throw PreconditionError(msg.str());
    }
  }
  for (double t : {0.0, 1.0}) {
    if (std::abs(f_.derivative(t, l)) <= 1e-12) {
      std::ostringstream msg;
      msg << "f^(" << l << ")(" << t << ") = 0; only the estimation region [h, 1 - h] is checked";
      warnings_.push_back(msg.str());
    }
  }
  const auto found = find_derivative_zeros(f_, l, h, 1.0 - h);
  const auto inside = std::count_if(x_.begin(), x_.end(), [&](double x) { return x >= h && x <= 1.0 - h; });
  if (static_cast<std::size_t>(inside) != found.size()) {
    std::ostringstream msg;
    msg << found.size() << " sign changes of f^(" << l << ") found in [h, 1 - h] but " << inside
        << " change points listed there";
    warnings_.push_back(msg.str());
  }
}

double sigma_if(const ChangePointProblem& p, std::size_t k) {
  const int l = p.order();
  const double h = p.spec().halfwidth();
  const double sd = p.spec().noise_sd();
  const double s = p.slope(k);
  const double dens = p.distribution().density(p.change_points()[k]);
  const double num = sd * sd * p.spec().estimator_kernel().l2_norm_sq();
  return std::sqrt(num / (s * s * static_cast<double>(p.n()) * dens * std::pow(h, 2 * l + 1)));
}

double sigma_if_exact(const ChangePointProblem& p, const KernelSmoother& sm, std::size_t k) {
  const auto& pts = sm.design().points();
  std::vector<double> fv(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) fv[i] = p.truth()(pts[i]);
  return sm.moments(p.change_points()[k], fv).sigma / std::abs(p.slope(k));
}

TailBound tail_bound(const ChangePointProblem& p, double w) {
  if (!(w > 0.0)) throw PreconditionError("tail_bound needs w > 0");
  const double h = p.spec().halfwidth();
  const int l = p.order();
  TailBound out;
  const double hyp = w * w * static_cast<double>(p.n()) * std::pow(h, 2 * l + 1);
  if (hyp < 1.0) {
    std::ostringstream msg;
    msg << "w^2 N h^(2l+1) = " << hyp << " < 1";
    out.warnings.push_back(msg.str());
  }
  if (h / w > 0.5) {
    std::ostringstream msg;
    msg << "h / w = " << h / w << " > 0.5; the bound assumes h / w -> 0";
    out.warnings.push_back(msg.str());
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double s = sigma_if(p, k);
    const double term = s / h * std::exp(-w * w / (2.0 * s * s));
    out.per_point.push_back(term);
    out.value += term;
  }
  return out;
}

FalseChangePoints expected_false_changepoints(const ChangePointProblem& p) {
  const PolyKernel& kern = p.spec().kernel();
  if (kern.moment(1) != 0) throw PreconditionError("expected_false_changepoints needs a kernel with zero first moment");
  const int l = p.order();
  const double h = p.spec().halfwidth();
  const double sd = p.spec().noise_sd();
  const double n = static_cast<double>(p.n());
  const double norm = std::sqrt(p.spec().derivative_kernel().l2_norm_sq());
  FalseChangePoints out;
  out.rate_constant = h * std::pow(n, 1.0 / (2 * l + 3));
  if (out.rate_constant > 10.0 || out.rate_constant < 0.1) {
    std::ostringstream msg;
    msg << "h N^(1/(2l+3)) = " << out.rate_constant << " is far from the critical-rate regime";
    out.warnings.push_back(msg.str());
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double x = p.change_points()[k];
    const double z = std::abs(p.slope(k)) * std::sqrt(n * p.distribution().density(x) * std::pow(h, 2 * l + 3)) /
                     (sd * norm);
    const double hz = H(z);
    out.z.push_back(z);
    out.h_values.push_back(hz);
    out.excess += 2.0 * hz;
  }
  return out;
}

PilotHalfwidth pilot_halfwidth(int order, std::size_t n, double safety) {
  if (order < 0) throw PreconditionError("pilot_halfwidth needs order >= 0");
  if (n < 2) throw PreconditionError("pilot_halfwidth needs n >= 2");
  if (!(safety >= 1.0)) throw PreconditionError("pilot_halfwidth needs safety >= 1");
  const double nn = static_cast<double>(n);
  PilotHalfwidth out;
  out.unclamped = safety * std::log(nn) * std::pow(nn, -1.0 / (2 * order + 3));
  out.value = std::min(out.unclamped, kPilotHalfwidthCap);
  if (out.unclamped > kPilotHalfwidthCap) {
    out.clamped = true;
    std::ostringstream msg;
    msg << "pilot halfwidth " << out.unclamped << " exceeds the admissible range; clamped to " << kPilotHalfwidthCap;
    out.warning = msg.str();
  }
  return out;
}

void write_changepoint_header(std::ostream& os) { os << "x,slope,sigma_if,z,H\n"; }

void write_changepoint_rows(std::ostream& os, const ChangePointProblem& p) {
  const FalseChangePoints e = expected_false_changepoints(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    os << format_double(p.change_points()[k]) << ',' << format_double(p.slope(k)) << ','
       << format_double(sigma_if(p, k)) << ',' << format_double(e.z[k]) << ',' << format_double(e.h_values[k])
       << '\n';
  }
}

}  // namespace kcross
