#include "kcross/gp_moments.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

// Boost 1.74 pchip calls isnan unqualified; fpclassify makes boost::math::isnan visible.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "kcross/errors.hpp"
#include "kcross/text_format.hpp"

namespace kcross {

struct GPMoments::Interp {
  using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
  std::vector<Pchip> channels;  // m, dm, sigma, xi, mu
};

GPMoments GPMoments::from_function(Evaluator eval, std::vector<double> grid, std::vector<double> breakpoints) {
  if (grid.size() < 2) throw PreconditionError("GPMoments needs at least two grid points");
  if (!std::is_sorted(grid.begin(), grid.end())) throw PreconditionError("GPMoments grid must be sorted");
  GPMoments g;
  const std::size_t n = grid.size();
  g.m_.resize(n);
  g.dm_.resize(n);
  g.sigma_.resize(n);
  g.xi_.resize(n);
  g.mu_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const PointMoments p = eval(grid[j]);
    g.m_[j] = p.m;
    g.dm_[j] = p.dm;
    g.sigma_[j] = p.sigma;
    g.xi_[j] = p.xi;
    g.mu_[j] = p.mu;
  }
  g.grid_ = std::move(grid);
  g.eval_ = std::move(eval);
  std::sort(breakpoints.begin(), breakpoints.end());
  std::erase_if(breakpoints, [&](double x) { return !(x > g.grid_.front() && x < g.grid_.back()); });
  g.breakpoints_ = std::move(breakpoints);
  g.validate();
  return g;
}

GPMoments GPMoments::from_function(Evaluator eval, double a, double b, std::size_t n, std::vector<double> breakpoints) {
  if (n < 2 || !(b > a)) throw PreconditionError("GPMoments needs n >= 2 and a < b");
  std::vector<double> grid(n);
  for (std::size_t j = 0; j < n; ++j) grid[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1);
  grid.back() = b;
  return from_function(std::move(eval), std::move(grid), std::move(breakpoints));
}

GPMoments GPMoments::from_samples(std::vector<double> grid, std::vector<double> m, std::vector<double> dm,
                                  std::vector<double> sigma, std::vector<double> xi, std::vector<double> mu) {
  const std::size_t n = grid.size();
  if (n < 4) throw PreconditionError("interpolated GPMoments needs at least four grid points");
  if (m.size() != n || dm.size() != n || sigma.size() != n || xi.size() != n || mu.size() != n)
    throw PreconditionError("GPMoments columns differ in length");
  for (std::size_t j = 1; j < n; ++j)
    if (!(grid[j] > grid[j - 1])) throw PreconditionError("GPMoments grid must be strictly increasing");
  GPMoments g;
  g.grid_ = std::move(grid);
  g.m_ = std::move(m);
  g.dm_ = std::move(dm);
  g.sigma_ = std::move(sigma);
  g.xi_ = std::move(xi);
  g.mu_ = std::move(mu);
  g.validate();
  g.build_interpolant();
  return g;
}

void GPMoments::build_interpolant() {
  auto interp = std::make_shared<Interp>();
  for (const std::vector<double>* ch : {&m_, &dm_, &sigma_, &xi_, &mu_}) {
    interp->channels.emplace_back(std::vector<double>(grid_), std::vector<double>(*ch));
  }
  interp_ = std::move(interp);
}

void GPMoments::validate() const {
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    if (!(sigma_[j] > 0.0) || !(xi_[j] > 0.0)) {
      std::ostringstream msg;
      msg << "degenerate process at s = " << grid_[j] << ": sigma = " << sigma_[j] << ", xi = " << xi_[j];
      throw DegenerateProcessError(msg.str());
    }
    if (!(std::abs(mu_[j]) < 1.0)) {
      std::ostringstream msg;
      msg << "|mu| = " << std::abs(mu_[j]) << " at s = " << grid_[j] << " violates |mu| < 1, needed by the zero-count integral";
      throw HypothesisError(msg.str());
    }
  }
}

PointMoments GPMoments::at(double s) const {
  if (eval_) return eval_(s);
  s = std::clamp(s, grid_.front(), grid_.back());
  const auto& c = interp_->channels;
  PointMoments p{c[0](s), c[1](s), c[2](s), c[3](s), c[4](s)};
  p.sigma = std::max(p.sigma, std::numeric_limits<double>::min());
  p.xi = std::max(p.xi, std::numeric_limits<double>::min());
  p.mu = std::clamp(p.mu, -1.0 + 1e-15, 1.0 - 1e-15);
  return p;
}

std::vector<double> GPMoments::gamma() const {
  std::vector<double> out(size());
  for (std::size_t j = 0; j < size(); ++j) out[j] = at_node(j).gamma();
  return out;
}

std::vector<double> GPMoments::eta() const {
  std::vector<double> out(size());
  for (std::size_t j = 0; j < size(); ++j) out[j] = at_node(j).eta();
  return out;
}

void GPMoments::write_columns(std::ostream& os) const {
  os << "# grid m sigma xi mu eta\n";
  for (std::size_t j = 0; j < size(); ++j) {
    const PointMoments p = at_node(j);
    os << format_double(grid_[j]) << ' ' << format_double(p.m) << ' ' << format_double(p.sigma) << ' '
       << format_double(p.xi) << ' ' << format_double(p.mu) << ' ' << format_double(p.eta()) << '\n';
  }
}

GPMoments GPMoments::read_columns(std::istream& is) {
  std::vector<double> grid, m, dm, sigma, xi, mu;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double s, mm, sd, x, u, e;
    if (!(row >> s >> mm >> sd >> x >> u >> e))
      throw ConfigError("moments file line " + std::to_string(lineno) + ": expected 6 columns");
    const double g = std::sqrt(std::max(0.0, (1.0 - u) * (1.0 + u)));
    grid.push_back(s);
    m.push_back(mm);
    sigma.push_back(sd);
    xi.push_back(x);
    mu.push_back(u);
    dm.push_back(e * x * g + x * u * mm / sd);
  }
  return from_samples(std::move(grid), std::move(m), std::move(dm), std::move(sigma), std::move(xi), std::move(mu));
}

}  // namespace kcross
