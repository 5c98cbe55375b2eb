#include "gsc/exit_time.hpp"

#include <cmath>
#include <limits>

#include "gsc/errors.hpp"
#include "gsc/util.hpp"

namespace gsc {

ExitSolve mean_exit(const LatticeDomain& domain, std::uint32_t start, const std::vector<Face>& targets,
                    const SolveOptions& options) {
  if (targets.empty()) throw ContractViolation("mean_exit: target face set is empty");
  if (start >= domain.size()) throw ContractViolation("mean_exit: start node outside the domain");
  Constraints cons(domain.size());
  cons.source.assign(domain.size(), 0.0);
  bool any = false;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    bool hit = false;
    for (const auto& f : targets) hit = hit || domain.touches(i, f.axis, f.side);
    if (hit) {
      cons.pin(static_cast<std::uint32_t>(i), 0.0);
      any = true;
    } else {
      // s_i = 1 + mean of neighbours, scaled by the edge conductance.
      cons.source[i] = domain.conductance * static_cast<double>(domain.neighbors(i).size());
    }
  }
  if (!any) throw ContractViolation("mean_exit: no node touches the target faces");
  ExitSolve out;
  out.solution = solve_dirichlet(domain, cons, options);
  out.steps = out.solution.values[start];
  return out;
}

ExitSolve origin_exit(const GscPattern& pattern, int n, int m_prime, const SolveOptions& options,
                      std::size_t node_cap) {
  const auto domain = build_lattice(pattern, n, m_prime, node_cap);
  std::vector<Face> far;
  for (int a = 0; a < pattern.dim(); ++a) far.push_back({a, 1});
  // Node 0 is the lexicographically first cell, i.e. the one at the origin
  // (retained by the borders axiom).
  return mean_exit(domain, 0, far, options);
}

ExitTimeSeries exit_series(const GscPattern& pattern, int n_max, int extra, double rho_hat,
                           const SolveOptions& options, std::size_t node_cap) {
  if (n_max < 1) throw ContractViolation("exit_series: n_max must be >= 1");
  if (!(rho_hat > 0.0)) throw ContractViolation("exit_series: rho must be positive");
  ExitTimeSeries s;
  s.rho_hat = rho_hat;
  s.rhobar_hat = rho_hat * pattern.mass() / std::pow(static_cast<double>(pattern.scale()), 2);
  try {
    for (int n = 1; n <= n_max; ++n) {
      const int mp = n + extra;
      const auto r = origin_exit(pattern, n, mp, options, node_cap);
      ExitEntry e;
      e.n = n;
      e.m_prime = mp;
      e.steps = r.steps;
      const double h = std::pow(static_cast<double>(pattern.scale()), -mp);
      e.t = r.steps * h * h / pattern.dim();
      e.a = e.t / std::pow(s.rhobar_hat, n);
      e.alpha = 1.0 / e.a;
      e.rel_change = s.entries.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : std::abs(e.a - s.entries.back().a) / s.entries.back().a;
      e.iterations = r.solution.iterations;
      e.residual = r.solution.residual;
      s.entries.push_back(e);
    }
  } catch (const SolverError& e) {
    s.complete = false;
    s.error = std::string(e.what()) + " (residual " + format_double(e.residual()) + ")";
  }
  if (!s.entries.empty()) s.c0_hat = s.entries.back().a;
  return s;
}

}  // namespace gsc
