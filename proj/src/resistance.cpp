#include "gsc/resistance.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "gsc/errors.hpp"
#include "gsc/util.hpp"

namespace gsc {

Constraints resistance_constraints(const LatticeDomain& domain, int axis, BoundaryMode mode) {
  if (axis < 0 || axis >= domain.dim()) throw ContractViolation("resistance: axis out of range");
  Constraints cons(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto node = static_cast<std::uint32_t>(i);
    for (int s = 0; s < 2; ++s) {
      if (!domain.touches(i, axis, s)) continue;
      if (mode == BoundaryMode::Face) {
        cons.terminals.push_back({node, 2.0 * domain.conductance, static_cast<double>(s)});
      } else {
        if (domain.grid_level == 0)
          throw ContractViolation("resistance: cell mode needs m' >= 1");
        cons.pin(node, static_cast<double>(s));
      }
    }
  }
  return cons;
}

RawResistance raw_resistance(const LatticeDomain& domain, const ResistanceOptions& options,
                             int axis) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol =
      solve_dirichlet(domain, resistance_constraints(domain, axis, options.mode), options.solve);
  RawResistance r;
  r.D = options.half_factor ? 0.5 * sol.energy : sol.energy;
  r.residual = sol.residual;
  r.iterations = sol.iterations;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

RawResistance raw_resistance(const GscPattern& pattern, int n, int m_prime,
                             const ResistanceOptions& options, int axis) {
  const auto t0 = std::chrono::steady_clock::now();
  auto r = raw_resistance(build_lattice(pattern, n, m_prime, options.node_cap), options, axis);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double walk_dimension(const GscPattern& pattern, double rho_hat) {
  return std::log(rho_hat * pattern.mass()) / std::log(static_cast<double>(pattern.scale()));
}

void finalize_series(ResistanceSeries& s, const GscPattern& pattern) {
  const double L = pattern.scale();
  const int d = pattern.dim();
  double prev = s.D0;
  for (auto& e : s.entries) {
    e.ratio = prev / e.D;
    prev = e.D;
  }
  if (s.entries.empty()) return;
  s.rho_hat = s.entries.back().ratio * std::pow(L, -(d - 2));
  // OLS slope of log D_n against n over the last (up to) four levels.
  const std::size_t k = std::min<std::size_t>(4, s.entries.size());
  if (k >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = s.entries.size() - k; i < s.entries.size(); ++i) {
      const double x = s.entries[i].n, y = std::log(s.entries[i].D);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    s.rho_regression = std::exp(-slope) * std::pow(L, -(d - 2));
  } else {
    s.rho_regression = s.rho_hat;
  }
  s.rhobar_hat = s.rho_hat * pattern.mass() / (L * L);
  s.dw_hat = walk_dimension(pattern, s.rho_hat);
  s.ds_hat = 2.0 * dims(pattern).d_f / s.dw_hat;
  for (auto& e : s.entries)
    e.R_hat = 1.0 / (std::pow(s.rho_hat, e.n) * std::pow(L, (d - 2) * e.n) * e.D);
}

ResistanceSeries resistance_series(const GscPattern& pattern, int n_max, int extra,
                                   const ResistanceOptions& options) {
  if (n_max < 2) throw ContractViolation("resistance_series: n_max must be >= 2");
  if (extra < 0) throw ContractViolation("resistance_series: extra must be >= 0");
  ResistanceSeries s;
  try {
    s.D0 = raw_resistance(pattern, 0, std::max(extra, options.mode == BoundaryMode::Cell ? 1 : 0),
                          options)
               .D;
    for (int n = 1; n <= n_max; ++n) {
      const auto r = raw_resistance(pattern, n, n + extra, options);
      s.entries.push_back({n, n + extra, r.D, 0.0, 0.0, r.residual, r.iterations, r.seconds});
    }
  } catch (const SolverError& e) {
    s.complete = false;
    s.error = std::string(e.what()) + " (residual " + format_double(e.residual()) + " after " +
              std::to_string(e.iterations()) + " iterations)";
  }
  finalize_series(s, pattern);
  return s;
}

double energy_scale(const GscPattern& pattern, int m, double rho_hat) {
  return std::pow(rho_hat * std::pow(static_cast<double>(pattern.scale()), pattern.dim() - 2), m);
}

double phi(const GscPattern& pattern, int m, double r, double rho_hat) {
  if (!(r > 0.0)) throw ContractViolation("phi: r must be positive");
  const double L = pattern.scale();
  const double dw = walk_dimension(pattern, rho_hat);
  const double df = dims(pattern).d_f;
  const int d = pattern.dim();
  if (r >= std::pow(L, -m)) return std::pow(r, df - dw);
  return std::pow(L, (dw - df + d - 2) * m) * std::pow(r, d - 2);
}

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

std::optional<double> harnack_ratio(const LatticeDomain& domain, std::span<const double> center,
                                    double r, const PointFunction& boundary,
                                    const SolveOptions& options) {
  Constraints cons(domain.size());
  std::vector<double> dists(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto x = domain.center(i);
    dists[i] = dist(x, center);
    if (dists[i] > r) cons.pin(static_cast<std::uint32_t>(i), boundary(x));
  }
  const auto sol = solve_dirichlet(domain, cons, options);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (dists[i] <= r / 2) {
      lo = std::min(lo, sol.values[i]);
      hi = std::max(hi, sol.values[i]);
    }
  if (!std::isfinite(lo)) throw ContractViolation("harnack_ratio: half-ball contains no nodes");
  if (lo <= 0.0) return std::nullopt;
  return hi / lo;
}

double poincare_ratio(const LatticeDomain& domain, const std::vector<double>& values,
                      std::span<const double> x, double r, double c, double rho_hat) {
  if (!(c > 0.0 && c < 1.0)) throw ContractViolation("poincare_ratio: c must lie in (0,1)");
  const auto e = node_energies(domain, values);
  CompensatedSum energy, mean;
  std::vector<double> inner;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const double di = dist(domain.center(i), x);
    if (di <= r) energy.add(e[i]);
    if (di <= c * r) inner.push_back(values[i]);
  }
  if (inner.empty()) throw ContractViolation("poincare_ratio: inner ball contains no nodes");
  for (double v : inner) mean.add(v);
  const double avg = mean.value() / static_cast<double>(inner.size());
  CompensatedSum dev;
  for (double v : inner) dev.add((v - avg) * (v - avg));
  const double msd = dev.value() / static_cast<double>(inner.size());
  const double en = energy.value() * energy_scale(domain.pattern, domain.domain_level, rho_hat);
  // Deviations at rounding level count as zero.
  if (msd <= 1e-28) return 0.0;
  if (en == 0.0) return std::numeric_limits<double>::infinity();
  return phi(domain.pattern, domain.domain_level, r, rho_hat) * msd / en;
}

}  // namespace gsc
