#pragma once

#include <span>
#include <string>
#include <vector>

#include "kcross/gp_moments.hpp"

namespace kcross {

// Standard normal density and distribution function.
double phi(double z);
double Phi(double z);

// Q(z) = 2 phi(z) + z [2 Phi(z) - 1]
double Q(double z);
// Qtilde(z) = 2 int_{|z|}^inf phi(s) (s - |z|) ds = 2 [phi(|z|) - |z| (1 - Phi(|z|))],
// so that Q(z) = |z| + Qtilde(z).
double Qtilde(double z);
// H(z) = phi(z)/z + Phi(z) - 1 for z > 0; DomainError otherwise.
double H(double z);

struct CrossingOptions {
  double abs_tol = 1e-6;
  // expected_zeros_alternate throws ConsistencyError on a gap above tolerance.
  bool enforce_consistency = true;
};

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

// E[N_z] = int (xi gamma / sigma) phi(m / sigma) Q(eta) ds over the grid span.
// Throws NumericError when the adaptive quadrature does not converge.
IntegralEstimate expected_zeros_classic(const GPMoments& mom, const CrossingOptions& opt = {});

struct ZeroPoint {
  double location;
  bool at_endpoint;
};

struct Extremum {
  double location;
  double value;      // |M| at the extremum
  int multiplicity;  // 1 at an interval endpoint, 2 in the interior
};

// Zeros and relative extrema of |M(t)|, M = m/sigma. Zeros of M are the zero
// minima of |M| and are listed only in `zeros`; `minima` holds the nonzero
// minima. Endpoints always appear as a zero, a minimum, or a maximum.
struct ExtremaProfile {
  std::vector<ZeroPoint> zeros;
  std::vector<Extremum> minima;
  std::vector<Extremum> maxima;

  // N_z^0, endpoint zeros included.
  std::size_t zero_count() const { return zeros.size(); }
  std::size_t endpoint_zero_count() const;
  std::size_t interior_zero_count() const { return zero_count() - endpoint_zero_count(); }
};

// Zeros of M are bracketed by sign changes and bisected to 1e-12; extrema of
// |M| are sign changes of d|M|/dt = sign(M) M' over the grid cells and the
// breakpoints (kinks). Throws DegenerateProcessError when M vanishes on two
// consecutive grid nodes.
ExtremaProfile find_extrema(const GPMoments& mom);

struct CrossingReport {
  double expected_zeros = 0.0;
  double n_z0 = 0.0;             // interior zeros of M
  double minima_term = 0.0;      // sum nu_j Phi(-m_j), plus 1/2 per endpoint zero
  double maxima_term = 0.0;      // sum nuhat_j Phi(-M_j)
  double residual_integral = 0.0;
  double classic_integral = 0.0;
  double quadrature_error_estimate = 0.0;
  double tolerance = 0.0;        // 2 x summed quadrature tolerance
  std::size_t endpoint_zeros = 0;
  std::size_t minima_count = 0;
  std::size_t maxima_count = 0;

  double consistency_gap() const { return expected_zeros - classic_integral; }
};

// E[N_z] = N_z^0 + sum nu_j Phi(-m_j) - sum nuhat_j Phi(-M_j) + int (xi gamma/sigma) phi(M) Qtilde(eta).
// The classic integral is computed alongside; a gap above `tolerance` throws
// ConsistencyError. A zero of M exactly at an endpoint contributes Phi(0) = 1/2
// through the minima term (multiplicity 1) and is counted in endpoint_zeros.
CrossingReport expected_zeros_alternate(const GPMoments& mom, const CrossingOptions& opt = {});

struct CorollaryWindow {
  double center;
  double halfwidth;
};

struct CorollaryBound {
  double first_term = 0.0;   // sum Psi_k / (c |m'(x_k)|)
  double order_term = 0.0;   // (C T + 2 L_mn) phi(m_o), constant 1
  double total = 0.0;
  std::vector<double> psi;
  double sup_xi_over_sigma = 0.0;
  double m_o = 0.0;
  double interval_length = 0.0;
  std::size_t nonzero_minima = 0;
};

// Small-noise upper bound on E[N_z] - N_z^0. Checks on the grid that m' keeps
// the sign of m'(x_k) across every window and |M(t)| >= c |m'(x_k)| |t - x_k| /
// sigma(x_k); throws PreconditionError naming the first offending point
// otherwise. Windows must be disjoint.
CorollaryBound corollary_bound(const GPMoments& mom, std::span<const CorollaryWindow> windows, double c);

// Flat "key = value" record.
std::string to_key_value(const CrossingReport& r);

}  // namespace kcross
