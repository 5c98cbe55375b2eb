#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsc/geometry.hpp"
#include "gsc/lattice.hpp"
#include "gsc/solver.hpp"

namespace gsc {

struct ExitSolve {
  double steps = 0.0;  // mean number of walk steps from the start node
  HarmonicSolution solution;
};

/// Expected steps of the nearest-neighbour walk (reflecting at the graph
/// boundary) from `start` until it reaches a node touching one of `targets`.
ExitSolve mean_exit(const LatticeDomain& domain, std::uint32_t start, const std::vector<Face>& targets,
                    const SolveOptions& options = {});

/// Origin cell to the faces {x_i = 1} on F_n at grid m'.
ExitSolve origin_exit(const GscPattern& pattern, int n, int m_prime, const SolveOptions& options = {},
                      std::size_t node_cap = kDefaultNodeCap);

struct ExitEntry {
  int n = 0;
  int m_prime = 0;
  double steps = 0.0;
  double t = 0.0;      // steps * h^2 / d
  double a = 0.0;      // t / rhobar^n
  double alpha = 0.0;  // 1 / a
  double rel_change = 0.0;  // |a_n - a_{n-1}| / a_{n-1}; NaN on the first row
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct ExitTimeSeries {
  double rho_hat = 0.0;
  double rhobar_hat = 0.0;
  std::vector<ExitEntry> entries;
  double c0_hat = 0.0;  // a at the last level
  bool complete = true;
  std::string error;
};

ExitTimeSeries exit_series(const GscPattern& pattern, int n_max, int extra, double rho_hat,
                           const SolveOptions& options = {}, std::size_t node_cap = kDefaultNodeCap);

}  // namespace gsc
