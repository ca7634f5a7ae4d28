#include "kcross/crossings.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kcross/errors.hpp"
#include "kcross/quadrature.hpp"
#include "kcross/text_format.hpp"

namespace kcross {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
// |M| below this is treated as an exact zero of the standardized mean.
constexpr double kZeroTol = 1e-13;

int sign_of(double v) { return v > kZeroTol ? 1 : (v < -kZeroTol ? -1 : 0); }

std::array<double, 2> integrands(const PointMoments& p) {
  const double g = p.gamma();
  const double eta = p.eta();
  const double w = p.xi * g / p.sigma * phi(p.m / p.sigma);
  if (w == 0.0) return {0.0, 0.0};
  return {w * Q(eta), w * Qtilde(eta)};
}

template <class Fn>
double bisect_sign_change(Fn&& f, double lo, double hi, double flo) {
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Zeros of M from sign changes between grid nodes. No degeneracy check: used
// only to seed quadrature split points.
std::vector<double> mean_zero_seeds(const GPMoments& mom) {
  std::vector<double> zeros;
  auto M = [&](double t) { return mom.at(t).M(); };
  const auto& grid = mom.grid();
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double a = mom.m()[j] / mom.sigma()[j];
    const double b = mom.m()[j + 1] / mom.sigma()[j + 1];
    if (a * b < 0.0) zeros.push_back(bisect_sign_change(M, grid[j], grid[j + 1], a));
  }
  return zeros;
}

std::vector<double> integration_partition(const GPMoments& mom, std::span<const double> zeros) {
  std::vector<double> cuts(mom.grid().begin(), mom.grid().end());
  cuts.insert(cuts.end(), mom.breakpoints().begin(), mom.breakpoints().end());
  cuts.insert(cuts.end(), zeros.begin(), zeros.end());
  return make_partition(mom.lo(), mom.hi(), cuts);
}

struct Sample {
  double t;
  double M;
  double dabs;  // d|M|/dt
  double dM;
};

Sample sample_at(const GPMoments& mom, double t) {
  const PointMoments p = mom.at(t);
  const double M = p.M();
  const double dM = p.dM();
  return {t, M, (M < 0.0 ? -dM : dM), dM};
}

}  // namespace

double phi(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double Phi(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double Q(double z) { return 2.0 * phi(z) + z * std::erf(z * kInvSqrt2); }

double Qtilde(double z) {
  const double a = std::abs(z);
  return 2.0 * (phi(a) - a * 0.5 * std::erfc(a * kInvSqrt2));
}

double H(double z) {
  if (!(z > 0.0)) throw DomainError("H(z) requires z > 0");
  return phi(z) / z - 0.5 * std::erfc(z * kInvSqrt2);
}

IntegralEstimate expected_zeros_classic(const GPMoments& mom, const CrossingOptions& opt) {
  const std::vector<double> zeros = mean_zero_seeds(mom);
  const std::vector<double> part = integration_partition(mom, zeros);
  QuadratureOptions qo;
  qo.abs_tol = opt.abs_tol;
  const auto r = integrate_partitioned<1>(
      [&](double s) { return std::array<double, 1>{integrands(mom.at(s))[0]}; }, part, qo);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "expected_zeros_classic: quadrature did not converge (value " << r.value[0] << ", error estimate "
        << r.error[0] << ", " << r.evaluations << " evaluations, " << part.size() - 1 << " cells)";
    throw NumericError(msg.str());
  }
  return {r.value[0], r.error[0], r.evaluations};
}

std::size_t ExtremaProfile::endpoint_zero_count() const {
  return static_cast<std::size_t>(
      std::count_if(zeros.begin(), zeros.end(), [](const ZeroPoint& z) { return z.at_endpoint; }));
}

ExtremaProfile find_extrema(const GPMoments& mom) {
  const auto& grid = mom.grid();
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    if (sign_of(mom.m()[j] / mom.sigma()[j]) == 0 && sign_of(mom.m()[j + 1] / mom.sigma()[j + 1]) == 0) {
      std::ostringstream msg;
      msg << "M(t) vanishes on [" << grid[j] << ", " << grid[j + 1] << "]: the alternate form needs isolated zeros";
      throw DegenerateProcessError(msg.str());
    }
  }

  // Cells between consecutive grid nodes and breakpoints. With breakpoints the
  // derivative is only one-sided there, so cells are sampled just inside.
  std::vector<double> nodes(grid.begin(), grid.end());
  nodes.insert(nodes.end(), mom.breakpoints().begin(), mom.breakpoints().end());
  nodes = make_partition(mom.lo(), mom.hi(), nodes);
  const bool kinked = !mom.breakpoints().empty();

  std::vector<Sample> samples;
  std::vector<bool> across_node;  // samples[k] -> samples[k+1] straddles a node
  samples.reserve(2 * nodes.size());
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k], b = nodes[k + 1];
    const double delta = kinked ? 1e-7 * (b - a) : 0.0;
    if (k == 0 || kinked) {
      if (k > 0) across_node.push_back(true);
      samples.push_back(sample_at(mom, k == 0 ? a : a + delta));
    }
    across_node.push_back(false);
    samples.push_back(sample_at(mom, (k + 2 == nodes.size()) ? b : b - delta));
  }
  // Snap near-endpoint samples exactly to the endpoints.
  samples.front().t = mom.lo();
  samples.back().t = mom.hi();

  auto Mfun = [&](double t) { return mom.at(t).M(); };
  auto dMfun = [&](double t) { return mom.at(t).dM(); };

  ExtremaProfile prof;
  auto add_zero = [&](double t, bool endpoint) {
    if (!prof.zeros.empty() && std::abs(prof.zeros.back().location - t) < 1e-12) return;
    prof.zeros.push_back({t, endpoint});
  };

  const Sample& first = samples.front();
  const Sample& last = samples.back();

  // Left endpoint.
  if (sign_of(first.M) == 0) {
    add_zero(first.t, true);
  } else {
    double slope = first.dabs;
    if (slope == 0.0 && samples.size() > 1) slope = std::abs(samples[1].M) - std::abs(first.M);
    (slope > 0.0 ? prof.minima : prof.maxima).push_back({first.t, std::abs(first.M), 1});
  }

  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const Sample& s0 = samples[k];
    const Sample& s1 = samples[k + 1];
    const int sg0 = sign_of(s0.M), sg1 = sign_of(s1.M);
    if (sg1 == 0) {
      if (k + 2 < samples.size()) add_zero(s1.t, false);
      continue;
    }
    if (sg0 == 0) continue;
    if (sg0 != sg1) {
      add_zero(bisect_sign_change(Mfun, s0.t, s1.t, s0.M), false);
      continue;
    }
    const bool up0 = s0.dabs > 0.0, up1 = s1.dabs > 0.0;
    const bool down0 = s0.dabs < 0.0, down1 = s1.dabs < 0.0;
    const bool is_max = up0 && down1;
    const bool is_min = down0 && up1;
    if (!is_max && !is_min) continue;
    double loc;
    if (across_node[k]) {
      loc = 0.5 * (s0.t + s1.t);
    } else {
      loc = bisect_sign_change(dMfun, s0.t, s1.t, s0.dM);
    }
    const double val = std::abs(Mfun(loc));
    if (is_min && sign_of(val) == 0) {
      add_zero(loc, false);  // tangency
    } else {
      (is_max ? prof.maxima : prof.minima).push_back({loc, val, 2});
    }
  }

  // Right endpoint.
  if (sign_of(last.M) == 0) {
    add_zero(last.t, true);
  } else {
    double slope = last.dabs;
    if (slope == 0.0 && samples.size() > 1) slope = std::abs(last.M) - std::abs(samples[samples.size() - 2].M);
    (slope > 0.0 ? prof.maxima : prof.minima).push_back({last.t, std::abs(last.M), 1});
  }
  return prof;
}

CrossingReport expected_zeros_alternate(const GPMoments& mom, const CrossingOptions& opt) {
  const ExtremaProfile prof = find_extrema(mom);

  CrossingReport rep;
  rep.endpoint_zeros = prof.endpoint_zero_count();
  rep.n_z0 = static_cast<double>(prof.interior_zero_count());
  for (const auto& e : prof.minima) rep.minima_term += e.multiplicity * Phi(-e.value);
  rep.minima_term += 0.5 * static_cast<double>(rep.endpoint_zeros);
  for (const auto& e : prof.maxima) rep.maxima_term += e.multiplicity * Phi(-e.value);
  rep.minima_count = prof.minima.size();
  rep.maxima_count = prof.maxima.size();

  std::vector<double> zeros;
  for (const auto& z : prof.zeros) zeros.push_back(z.location);
  const std::vector<double> part = integration_partition(mom, zeros);
  QuadratureOptions qo;
  qo.abs_tol = opt.abs_tol;
  const auto r = integrate_partitioned<2>([&](double s) { return integrands(mom.at(s)); }, part, qo);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "expected_zeros_alternate: quadrature did not converge after " << r.evaluations << " evaluations";
    throw NumericError(msg.str());
  }
  rep.classic_integral = r.value[0];
  rep.residual_integral = r.value[1];
  rep.quadrature_error_estimate = r.error[0] + r.error[1];
  rep.tolerance = 2.0 * (opt.abs_tol + opt.abs_tol);
  rep.expected_zeros = rep.n_z0 + rep.minima_term - rep.maxima_term + rep.residual_integral;

  if (opt.enforce_consistency && !(std::abs(rep.consistency_gap()) <= rep.tolerance)) {
    std::ostringstream msg;
    msg << "alternate form " << rep.expected_zeros << " disagrees with the classic integral " << rep.classic_integral
        << " (gap " << rep.consistency_gap() << ", tolerance " << rep.tolerance << ")";
    throw ConsistencyError(msg.str());
  }
  return rep;
}

namespace {

double golden_max(const std::function<double(double)>& g, double a, double b) {
  constexpr double r = 0.61803398874989484820;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  for (int i = 0; i < 200 && (b - a) > 1e-13; ++i) {
    if (gc > gd) {
      b = d; d = c; gd = gc;
      c = b - r * (b - a); gc = g(c);
    } else {
      a = c; c = d; gc = gd;
      d = a + r * (b - a); gd = g(d);
    }
  }
  return std::max(gc, gd);
}

}  // namespace

CorollaryBound corollary_bound(const GPMoments& mom, std::span<const CorollaryWindow> windows, double c) {
  if (!(c > 0.0 && c < 1.0)) throw PreconditionError("corollary_bound needs 0 < c < 1");
  std::vector<CorollaryWindow> win(windows.begin(), windows.end());
  std::sort(win.begin(), win.end(), [](const auto& x, const auto& y) { return x.center < y.center; });
  for (std::size_t k = 0; k < win.size(); ++k) {
    if (!(win[k].halfwidth > 0.0)) throw PreconditionError("corollary window halfwidths must be positive");
    if (k > 0 && win[k - 1].center + win[k - 1].halfwidth > win[k].center - win[k].halfwidth)
      throw PreconditionError("corollary windows must be disjoint");
  }

  const auto& grid = mom.grid();
  CorollaryBound out;
  out.interval_length = mom.hi() - mom.lo();

  auto psi_fn = [&](double s, double sigma_k) {
    const PointMoments p = mom.at(s);
    return Qtilde(p.eta()) * p.xi * p.gamma() * sigma_k / p.sigma;
  };

  for (const auto& w : win) {
    const PointMoments at_center = mom.at(w.center);
    // Z -> -Z leaves the zero count unchanged, so decreasing crossings are
    // handled through |m'| with m' of one strict sign over the window.
    const double slope = std::abs(at_center.dm);
    const double orient = at_center.dm < 0.0 ? -1.0 : 1.0;
    const double sigma_k = at_center.sigma;
    const double lo = std::max(mom.lo(), w.center - w.halfwidth);
    const double hi = std::min(mom.hi(), w.center + w.halfwidth);
    double best = psi_fn(w.center, sigma_k);
    double best_t = w.center;
    for (double t : {lo, hi}) {
      const double v = psi_fn(t, sigma_k);
      if (v > best) { best = v; best_t = t; }
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double t = grid[j];
      if (t < lo || t > hi) continue;
      const PointMoments p = mom.at_node(j);
      const double need = c * slope * std::abs(t - w.center) / sigma_k;
      if (!(orient * p.dm > 0.0) || std::abs(p.M()) < need * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "corollary hypothesis fails at t = " << t << " in window (" << w.center << ", " << w.halfwidth
            << "): m' = " << p.dm << " (sign must match m'(x_k)), |M| = " << std::abs(p.M()) << ", required >= " << need;
        throw PreconditionError(msg.str());
      }
      const double v = Qtilde(p.eta()) * p.xi * p.gamma() * sigma_k / p.sigma;
      if (v > best) { best = v; best_t = t; }
    }
    // Refine the supremum around the best sample.
    const double step = grid.size() > 1 ? grid[1] - grid[0] : (hi - lo);
    const double a = std::max(lo, best_t - step), b = std::min(hi, best_t + step);
    if (b > a) best = std::max(best, golden_max([&](double s) { return psi_fn(s, sigma_k); }, a, b));
    out.psi.push_back(best);
    out.first_term += best / (c * slope);
  }

  double sup_ratio = 0.0;
  double m_o = std::numeric_limits<double>::infinity();
  auto outside = [&](double t) {
    return std::all_of(win.begin(), win.end(), [&](const auto& w) { return std::abs(t - w.center) >= w.halfwidth; });
  };
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const PointMoments p = mom.at_node(j);
    sup_ratio = std::max(sup_ratio, p.xi / p.sigma);
    if (outside(grid[j])) m_o = std::min(m_o, std::abs(p.M()));
  }
  for (const auto& w : win) {
    for (double t : {w.center - w.halfwidth, w.center + w.halfwidth})
      if (t >= mom.lo() && t <= mom.hi() && outside(t)) m_o = std::min(m_o, std::abs(mom.at(t).M()));
  }
  out.sup_xi_over_sigma = sup_ratio;
  out.m_o = m_o;
  out.nonzero_minima = find_extrema(mom).minima.size();
  const double tail = std::isfinite(m_o) ? phi(m_o) : 0.0;
  out.order_term = (sup_ratio * out.interval_length + 2.0 * static_cast<double>(out.nonzero_minima)) * tail;
  out.total = out.first_term + out.order_term;
  return out;
}

std::string to_key_value(const CrossingReport& r) {
  std::ostringstream os;
  os << "expected_zeros = " << format_double(r.expected_zeros) << '\n'
     << "classic_integral = " << format_double(r.classic_integral) << '\n'
     << "n_z0 = " << format_double(r.n_z0) << '\n'
     << "minima_term = " << format_double(r.minima_term) << '\n'
     << "maxima_term = " << format_double(r.maxima_term) << '\n'
     << "residual_integral = " << format_double(r.residual_integral) << '\n'
     << "quadrature_error_estimate = " << format_double(r.quadrature_error_estimate) << '\n'
     << "tolerance = " << format_double(r.tolerance) << '\n'
     << "consistency_gap = " << format_double(r.consistency_gap()) << '\n'
     << "endpoint_zeros = " << r.endpoint_zeros << '\n'
     << "minima_count = " << r.minima_count << '\n'
     << "maxima_count = " << r.maxima_count << '\n';
  return os.str();
}

}  // namespace kcross
