#include "gsc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsc/errors.hpp"
#include "gsc/util.hpp"

namespace gsc {

double SparseLaplacian::at(std::size_t i, std::size_t j) const {
  for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (col[k] == j) return val[k];
  return 0.0;
}

SparseLaplacian assemble_laplacian(const LatticeDomain& domain) {
  SparseLaplacian a;
  const std::size_t n = domain.size();
  a.row_ptr.assign(n + 1, 0);
  const double c = domain.conductance;
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = domain.neighbors(i);
    bool diag_done = false;
    for (auto j : nb) {
      if (!diag_done && j > i) {
        a.col.push_back(static_cast<std::uint32_t>(i));
        a.val.push_back(c * static_cast<double>(nb.size()));
        diag_done = true;
      }
      a.col.push_back(j);
      a.val.push_back(-c);
    }
    if (!diag_done) {
      a.col.push_back(static_cast<std::uint32_t>(i));
      a.val.push_back(c * static_cast<double>(nb.size()));
    }
    a.row_ptr[i + 1] = a.col.size();
  }
  return a;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  // Four interleaved partial sums, combined in a fixed order.
  double s[4] = {0, 0, 0, 0};
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int k = 0; k < 4; ++k) s[k] += a[i + k] * b[i + k];
  for (; i < n; ++i) s[0] += a[i] * b[i];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

}  // namespace

HarmonicSolution solve_dirichlet(const LatticeDomain& domain, const Constraints& cons,
                                 const SolveOptions& options) {
  const std::size_t n = domain.size();
  if (cons.fixed.size() != n || cons.value.size() != n ||
      (!cons.source.empty() && cons.source.size() != n))
    throw ContractViolation("solve_dirichlet: constraint arrays do not match the domain");
  const bool any_fixed = std::any_of(cons.fixed.begin(), cons.fixed.end(), [](auto f) { return f; });
  if (!any_fixed && cons.terminals.empty())
    throw SolverError("singular system: no Dirichlet data", std::numeric_limits<double>::infinity(), 0);

  const double c = domain.conductance;
  // Reduced system over free nodes: renumber densely, keep lexicographic order.
  std::vector<std::uint32_t> free_id(n, UINT32_MAX);
  std::vector<std::uint32_t> free_nodes;
  for (std::size_t i = 0; i < n; ++i)
    if (!cons.fixed[i]) {
      free_id[i] = static_cast<std::uint32_t>(free_nodes.size());
      free_nodes.push_back(static_cast<std::uint32_t>(i));
    }
  const std::size_t nf = free_nodes.size();
  std::vector<double> diag(nf), rhs(nf, 0.0);
  for (std::size_t k = 0; k < nf; ++k) {
    const auto i = free_nodes[k];
    const auto nb = domain.neighbors(i);
    diag[k] = c * static_cast<double>(nb.size());
    for (auto j : nb)
      if (cons.fixed[j]) rhs[k] += c * cons.value[j];
    if (!cons.source.empty()) rhs[k] += cons.source[i];
  }
  for (const auto& t : cons.terminals) {
    if (t.node >= n) throw ContractViolation("solve_dirichlet: terminal node out of range");
    if (cons.fixed[t.node]) continue;
    diag[free_id[t.node]] += t.conductance;
    rhs[free_id[t.node]] += t.conductance * t.value;
  }

  HarmonicSolution sol;
  sol.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (cons.fixed[i]) sol.values[i] = cons.value[i];

  if (nf > 0) {
    // Reduced adjacency: free neighbours only, in free numbering.
    std::vector<std::uint64_t> rp(nf + 1, 0);
    std::vector<std::uint32_t> rc;
    rc.reserve(domain.adj.size());
    for (std::size_t k = 0; k < nf; ++k) {
      for (auto j : domain.neighbors(free_nodes[k]))
        if (free_id[j] != UINT32_MAX) rc.push_back(free_id[j]);
      rp[k + 1] = rc.size();
    }
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
      for (std::size_t k = 0; k < nf; ++k) {
        double nb = 0.0;
        for (auto e = rp[k]; e < rp[k + 1]; ++e) nb += x[rc[e]];
        y[k] = diag[k] * x[k] - c * nb;
      }
    };
    const std::size_t cap = options.max_iter
                                ? options.max_iter
                                : static_cast<std::size_t>(50.0 * std::sqrt(static_cast<double>(nf))) + 50;
    // Start from the mean boundary value so constant data is exact.
    CompensatedSum held;
    std::size_t nheld = 0;
    if (cons.source.empty()) {
      for (std::size_t i = 0; i < n; ++i)
        if (cons.fixed[i]) held.add(cons.value[i]), ++nheld;
      for (const auto& t : cons.terminals) held.add(t.value), ++nheld;
    }
    const double start = nheld ? held.value() / static_cast<double>(nheld) : 0.0;
    std::vector<double> x(nf, start), r(nf), p(nf), q(nf), inv(nf);
    for (std::size_t k = 0; k < nf; ++k) inv[k] = 1.0 / diag[k];
    apply(x, q);
    for (std::size_t k = 0; k < nf; ++k) r[k] = rhs[k] - q[k];
    const double bnorm = std::sqrt(dot(rhs, rhs));
    double rel = bnorm > 0.0 ? std::sqrt(dot(r, r)) / bnorm : 0.0;
    std::size_t it = 0;
    if (rel > options.tol) {
      // Fused passes; every reduction runs sequentially in node order.
      double rz = 0.0;
      for (std::size_t k = 0; k < nf; ++k) {
        p[k] = r[k] * inv[k];
        rz += r[k] * p[k];
      }
      while (rel > options.tol) {
        if (it == cap)
          throw SolverError("conjugate gradients did not converge", rel, it);
        double pq = 0.0;
        for (std::size_t k = 0; k < nf; ++k) {
          double nb = 0.0;
          for (auto e = rp[k]; e < rp[k + 1]; ++e) nb += p[rc[e]];
          q[k] = diag[k] * p[k] - c * nb;
          pq += p[k] * q[k];
        }
        const double alpha = rz / pq;
        double rr = 0.0, rz_next = 0.0;
        for (std::size_t k = 0; k < nf; ++k) {
          x[k] += alpha * p[k];
          r[k] -= alpha * q[k];
          rr += r[k] * r[k];
          rz_next += r[k] * r[k] * inv[k];
        }
        ++it;
        rel = std::sqrt(rr) / bnorm;
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t k = 0; k < nf; ++k) p[k] = r[k] * inv[k] + beta * p[k];
      }
      // Report the true residual rather than the recursive one.
      apply(x, q);
      for (std::size_t k = 0; k < nf; ++k) r[k] = rhs[k] - q[k];
      rel = std::sqrt(dot(r, r)) / bnorm;
    }
    for (std::size_t k = 0; k < nf; ++k) sol.values[free_nodes[k]] = x[k];
    sol.residual = rel;
    sol.iterations = it;
  }
  sol.node_energy = node_energies(domain, sol.values, cons.terminals);
  sol.energy = dirichlet_energy(domain, sol.values, cons.terminals);
  return sol;
}

double dirichlet_energy(const LatticeDomain& domain, const std::vector<double>& values,
                        const std::vector<Terminal>& terminals) {
  CompensatedSum e;
  const double c = domain.conductance;
  for (std::size_t i = 0; i < domain.size(); ++i)
    for (auto j : domain.neighbors(i))
      if (j > i) {
        const double dv = values[i] - values[j];
        e.add(c * dv * dv);
      }
  for (const auto& t : terminals) {
    const double dv = values[t.node] - t.value;
    e.add(t.conductance * dv * dv);
  }
  return e.value();
}

std::vector<double> node_energies(const LatticeDomain& domain, const std::vector<double>& values,
                                  const std::vector<Terminal>& terminals) {
  std::vector<double> out(domain.size(), 0.0);
  const double c = domain.conductance;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    CompensatedSum s;
    for (auto j : domain.neighbors(i)) {
      const double dv = values[i] - values[j];
      s.add(0.5 * c * dv * dv);
    }
    out[i] = s.value();
  }
  for (const auto& t : terminals) {
    const double dv = values[t.node] - t.value;
    out[t.node] += t.conductance * dv * dv;
  }
  return out;
}

std::map<CellIndex, double> per_cell_energy(const LatticeDomain& domain,
                                            const HarmonicSolution& solution, int level) {
  if (level < 0 || level > domain.grid_level)
    throw ContractViolation("per_cell_energy: level outside [0, m']");
  std::map<CellIndex, CompensatedSum> acc;
  for (std::size_t i = 0; i < domain.size(); ++i)
    acc[domain.cell_of(i, level)].add(solution.node_energy[i]);
  std::map<CellIndex, double> out;
  for (auto& [cell, s] : acc) out.emplace(cell, s.value());
  return out;
}

}  // namespace gsc
