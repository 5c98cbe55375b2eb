#include "gsc/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsc/errors.hpp"
#include "gsc/util.hpp"

namespace gsc {

namespace {

double mean_of(const std::vector<double>& values, const std::vector<std::uint32_t>& nodes) {
  CompensatedSum s;
  for (auto i : nodes) s.add(values[i]);
  return s.value() / static_cast<double>(nodes.size());
}

std::vector<double> averages_for(const LatticeDomain& domain, const std::vector<double>& values,
                                 const std::vector<SubFace>& faces) {
  const auto groups = face_node_groups(domain, faces);
  std::vector<double> out(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (groups[f].empty())
      throw ResolutionError("sub-face of level " + std::to_string(faces[f].level) +
                            " carries no grid nodes; increase m'");
    out[f] = mean_of(values, groups[f]);
  }
  return out;
}

// Deepest level k <= max_level at which the node's level-k cell touches the
// boundary of the reference box [0, side)^d given in grid units.
int boundary_depth(std::span<const std::int32_t> local, int scale, int levels, int max_level) {
  int depth = 0;
  std::int64_t div = ipow(scale, levels);  // grid units per level-0 box
  for (int k = 1; k <= max_level; ++k) {
    div /= scale;
    const std::int64_t last = ipow(scale, k) - 1;
    bool touch = false;
    for (auto x : local) {
      const std::int64_t c = x / div;
      if (c == 0 || c == last) {
        touch = true;
        break;
      }
    }
    if (!touch) break;
    depth = k;
  }
  return depth;
}

}  // namespace

std::pair<double, double> fit_decay(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return {0.0, y.empty() ? 0.0 : y.front()};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ly = std::log(y[i]);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  return {-slope, std::exp(intercept)};
}

double subface_average(const LatticeDomain& domain, const std::vector<double>& values,
                       const SubFace& face) {
  return averages_for(domain, values, {face}).front();
}

std::vector<double> subface_averages(const LatticeDomain& domain, const std::vector<double>& values,
                                     int k) {
  return averages_for(domain, values, subfaces(domain.pattern, domain.domain_level, k));
}

double discrete_energy_I(const LatticeDomain& domain, const std::vector<double>& values, int k) {
  if (k < 1) throw ContractViolation("discrete_energy_I: k must be >= 1");
  const auto avg = subface_averages(domain, values, k);
  CompensatedSum s;
  for (auto [a, b] : subface_adjacency(domain.pattern, domain.domain_level, k)) {
    const double diff = avg[a] - avg[b];
    s.add(diff * diff);
  }
  return s.value();
}

double BesovProfile::lambda(int n) const {
  CompensatedSum s;
  for (const auto& t : terms)
    if (t.k >= n) s.add(t.term);
  return s.value();
}

BesovProfile besov_profile(const LatticeDomain& domain, const std::vector<double>& values,
                           double rho_hat, int k_max) {
  BesovProfile p;
  const int resolved = max_resolved_level(domain);
  p.k_max = k_max < 0 ? resolved : k_max;
  if (p.k_max > resolved) {
    p.truncated = true;
    p.k_max = resolved;
  }
  const double L = domain.pattern.scale();
  for (int k = 1; k <= p.k_max; ++k) {
    BesovTerm t;
    t.k = k;
    t.I = discrete_energy_I(domain, values, k);
    t.phi = phi(domain.pattern, domain.domain_level, std::pow(L, -k), rho_hat);
    t.term = t.phi * t.I;
    p.terms.push_back(t);
  }
  return p;
}

double lambda_energy(const LatticeDomain& domain, const std::vector<double>& values, int n,
                     double rho_hat, int k_max) {
  if (n < 1) throw ContractViolation("lambda_energy: n must be >= 1");
  return besov_profile(domain, values, rho_hat, k_max).lambda(n);
}

ShellEnergyProfile shell_energy_profile(const LatticeDomain& domain,
                                        const std::vector<double>& node_energy, int max_level) {
  if (max_level < 0 || max_level > domain.grid_level)
    throw ContractViolation("shell_energy_profile: level outside [0, m']");
  std::vector<CompensatedSum> exact(static_cast<std::size_t>(max_level) + 1);
  for (std::size_t i = 0; i < domain.size(); ++i)
    exact[static_cast<std::size_t>(boundary_depth(domain.node(i), domain.pattern.scale(),
                                                  domain.grid_level, max_level))]
        .add(node_energy[i]);
  ShellEnergyProfile p;
  p.entries.resize(exact.size());
  double cum = 0.0;
  for (int k = max_level; k >= 0; --k) {
    auto& e = p.entries[static_cast<std::size_t>(k)];
    e.k = k;
    e.shell = exact[static_cast<std::size_t>(k)].value();
    cum += e.shell;
    e.cumulative = cum;
  }
  std::vector<double> xs, ys;
  for (const auto& e : p.entries) {
    if (e.k == 0) continue;
    if (e.cumulative <= 0.0) p.degenerate = true;
    xs.push_back(e.k);
    ys.push_back(e.cumulative);
  }
  if (p.entries.front().cumulative <= 0.0) p.degenerate = true;
  if (!p.degenerate) std::tie(p.rate, p.prefactor) = fit_decay(xs, ys);
  return p;
}

namespace {

RatioResult make_ratio(double num, double den) {
  RatioResult r{0.0, num, den, false};
  // Values at rounding level are treated as zero on both sides.
  const bool num_zero = num <= 1e-24;
  if (den <= 0.0) {
    r.violation = !num_zero;
    r.ratio = num_zero ? 0.0 : std::numeric_limits<double>::infinity();
    return r;
  }
  r.ratio = num / den;
  return r;
}

}  // namespace

RatioResult trace_ratio(const LatticeDomain& domain, const HarmonicSolution& solution, int n,
                        double rho_hat, const BesovProfile& profile) {
  if (n < 1) throw ContractViolation("trace_ratio: n must be >= 1");
  const auto shells = shell_energy_profile(domain, solution.node_energy, n - 1);
  const double den = energy_scale(domain.pattern, domain.domain_level, rho_hat) *
                     shells.entries[static_cast<std::size_t>(n - 1)].cumulative;
  return make_ratio(profile.lambda(n), den);
}

RatioResult extension_ratio(const LatticeDomain& domain, const HarmonicSolution& extension,
                            double rho_hat, const BesovProfile& profile) {
  const double num =
      energy_scale(domain.pattern, domain.domain_level, rho_hat) * extension.energy;
  auto r = make_ratio(num, profile.lambda(1));
  return r;
}

DecayProfile decay_experiment(const GscPattern& pattern, const CellIndex& cell, int m, int m_prime,
                              int depth, const PointFunction& boundary,
                              const SolveOptions& options, std::size_t node_cap) {
  const int l = cell.level;
  if (l < 1 || l > m || !in_precarpet(pattern, m, cell))
    throw ContractViolation("decay_experiment: cell must be a retained cell with 1 <= l <= m");
  if (depth < 1) throw ContractViolation("decay_experiment: depth must be >= 1");
  DecayProfile out;
  out.cell = cell;
  out.depth = depth;
  if (l + depth > m_prime) {
    out.depth = m_prime - l;
    out.truncated = true;
  }
  const auto domain = build_lattice(pattern, m, m_prime, node_cap);
  const std::int64_t div = ipow(pattern.scale(), m_prime - l);
  const auto d = static_cast<std::size_t>(pattern.dim());

  // Neighbourhood: level-l cells whose closed cubes meet the closed cell.
  std::vector<std::uint32_t> region;
  std::vector<std::uint8_t> in_region(domain.size(), 0);
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto c = domain.node(i);
    bool near = true;
    for (std::size_t a = 0; a < d && near; ++a) near = std::abs(c[a] / div - cell.coords[a]) <= 1;
    if (near) {
      region.push_back(static_cast<std::uint32_t>(i));
      in_region[i] = 1;
    }
  }
  const auto sub = induced_subgraph(domain, region);
  Constraints cons(sub.size());
  for (std::size_t r = 0; r < region.size(); ++r)
    for (auto j : domain.neighbors(region[r]))
      if (!in_region[j]) {
        cons.pin(static_cast<std::uint32_t>(r), boundary(sub.center(r)));
        break;
      }
  const auto sol = solve_dirichlet(sub, cons, options);
  out.iterations = sol.iterations;
  out.residual = sol.residual;
  out.neighbourhood_energy = sol.energy;

  std::vector<CompensatedSum> exact(static_cast<std::size_t>(out.depth) + 1);
  std::vector<std::int32_t> local(d);
  for (std::size_t r = 0; r < sub.size(); ++r) {
    const auto c = sub.node(r);
    bool inside = true;
    for (std::size_t a = 0; a < d && inside; ++a) {
      inside = c[a] / div == cell.coords[a];
      local[a] = static_cast<std::int32_t>(c[a] - cell.coords[a] * div);
    }
    if (!inside) continue;
    exact[static_cast<std::size_t>(
              boundary_depth(local, pattern.scale(), m_prime - l, out.depth))]
        .add(sol.node_energy[r]);
  }
  double cum = 0.0;
  out.entries.resize(exact.size());
  for (int n = out.depth; n >= 0; --n) {
    cum += exact[static_cast<std::size_t>(n)].value();
    out.entries[static_cast<std::size_t>(n)] = {n, cum};
  }
  if (out.neighbourhood_energy <= 0.0) {
    out.degenerate = true;
    for (auto& e : out.entries) e.cumulative = 0.0;
    return out;
  }
  std::vector<double> xs, ys;
  for (auto& e : out.entries) {
    e.cumulative /= out.neighbourhood_energy;
    if (e.n == 0) continue;
    if (e.cumulative <= 0.0) out.degenerate = true;
    xs.push_back(e.n);
    ys.push_back(e.cumulative);
  }
  if (!out.degenerate) std::tie(out.rate, out.prefactor) = fit_decay(xs, ys);
  return out;
}

}  // namespace gsc
