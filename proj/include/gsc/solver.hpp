#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "gsc/lattice.hpp"

namespace gsc {

/// Extra conductance `conductance` from `node` to a fixed potential `value`.
struct Terminal {
  std::uint32_t node = 0;
  double conductance = 0.0;
  double value = 0.0;
};

/// Dirichlet data: pinned nodes, terminal links, and an optional source term
/// (right-hand side added to every free row).
struct Constraints {
  std::vector<std::uint8_t> fixed;   // size N
  std::vector<double> value;         // size N; read where fixed
  std::vector<Terminal> terminals;
  std::vector<double> source;        // empty or size N

  explicit Constraints(std::size_t n = 0) : fixed(n, 0), value(n, 0.0) {}
  void pin(std::uint32_t node, double v) {
    fixed[node] = 1;
    value[node] = v;
  }
};

struct SolveOptions {
  double tol = 1e-10;           // relative to the reduced right-hand side
  std::size_t max_iter = 0;     // 0: 50 * sqrt(free nodes)
};

struct HarmonicSolution {
  std::vector<double> values;
  /// Per-node share: half of every incident edge plus the node's terminals.
  std::vector<double> node_energy;
  double energy = 0.0;          // summed over edges and terminals
  double residual = 0.0;        // final relative residual
  std::size_t iterations = 0;
};

/// Weighted Laplacian in CSR form: off-diagonals -c, rows sum to zero.
struct SparseLaplacian {
  std::vector<std::uint64_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t size() const { return row_ptr.empty() ? 0 : row_ptr.size() - 1; }
  double at(std::size_t i, std::size_t j) const;
};

SparseLaplacian assemble_laplacian(const LatticeDomain& domain);

/// Jacobi-preconditioned CG on the system reduced to free nodes.
HarmonicSolution solve_dirichlet(const LatticeDomain& domain, const Constraints& constraints,
                                 const SolveOptions& options = {});

/// Edge + terminal energy of arbitrary node values.
double dirichlet_energy(const LatticeDomain& domain, const std::vector<double>& values,
                        const std::vector<Terminal>& terminals = {});
std::vector<double> node_energies(const LatticeDomain& domain, const std::vector<double>& values,
                                  const std::vector<Terminal>& terminals = {});

/// Energy carried by each level-n cell (half-split rule for straddling edges).
std::map<CellIndex, double> per_cell_energy(const LatticeDomain& domain,
                                            const HarmonicSolution& solution, int level);

}  // namespace gsc
