#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gsc/lattice.hpp"
#include "gsc/resistance.hpp"
#include "gsc/solver.hpp"

namespace gsc {

/// Unweighted mean of node values over the sub-face.
double subface_average(const LatticeDomain& domain, const std::vector<double>& values,
                       const SubFace& face);
/// Averages over every sub-face of level k, in `subfaces` order.
std::vector<double> subface_averages(const LatticeDomain& domain, const std::vector<double>& values,
                                     int k);

/// Sum of squared average differences over adjacent pairs of level-k sub-faces.
double discrete_energy_I(const LatticeDomain& domain, const std::vector<double>& values, int k);

struct BesovTerm {
  int k = 0;
  double I = 0.0;
  double phi = 0.0;
  double term = 0.0;  // phi * I
};

struct BesovProfile {
  std::vector<BesovTerm> terms;  // k = 1..k_max
  int k_max = 0;
  bool truncated = false;        // requested k_max exceeded the grid resolution

  /// Partial sum over k >= n.
  double lambda(int n) const;
  /// Magnitude of the last summed term (tail indicator).
  double tail() const { return terms.empty() ? 0.0 : terms.back().term; }
};

/// I_k and phi-weighted terms for k = 1..k_max; k_max < 0 selects the finest
/// resolved level.
BesovProfile besov_profile(const LatticeDomain& domain, const std::vector<double>& values,
                           double rho_hat, int k_max = -1);

double lambda_energy(const LatticeDomain& domain, const std::vector<double>& values, int n,
                     double rho_hat, int k_max = -1);

struct ShellEntry {
  int k = 0;
  double shell = 0.0;       // energy in B_k minus B_{k+1}
  double cumulative = 0.0;  // energy in B_k
};

struct ShellEnergyProfile {
  std::vector<ShellEntry> entries;
  double rate = 0.0;        // fitted decay rate c
  double prefactor = 0.0;   // fitted C
  bool degenerate = false;  // zero energies: no fit
};

/// Raw energies of the boundary shells B_k(F_m), k = 0..max_level (half-split
/// rule through per-node shares).
ShellEnergyProfile shell_energy_profile(const LatticeDomain& domain,
                                        const std::vector<double>& node_energy, int max_level);

struct RatioResult {
  double ratio = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  bool violation = false;  // zero denominator with positive numerator
};

/// Lambda_n over the normalized energy in the shell B_{n-1}.
RatioResult trace_ratio(const LatticeDomain& domain, const HarmonicSolution& solution, int n,
                        double rho_hat, const BesovProfile& profile);

/// Normalized energy of an extension over Lambda_1 of its boundary trace.
RatioResult extension_ratio(const LatticeDomain& domain, const HarmonicSolution& extension,
                            double rho_hat, const BesovProfile& profile);

struct DecayEntry {
  int n = 0;
  double cumulative = 0.0;  // energy in the image shell, over the neighbourhood energy
};

struct DecayProfile {
  CellIndex cell;
  std::vector<DecayEntry> entries;  // n = 0..depth
  double rate = 0.0;
  double prefactor = 0.0;
  double neighbourhood_energy = 0.0;
  int depth = 0;
  bool truncated = false;   // requested depth exceeded the grid
  bool degenerate = false;  // zero energy
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Harmonic function on the neighbourhood of `cell` (level l) with data
/// `boundary` on the nodes bordering the rest of F_m; energies of the shells
/// of `cell` at levels l+n, n = 0..depth, and an OLS fit over n >= 1.
DecayProfile decay_experiment(const GscPattern& pattern, const CellIndex& cell, int m, int m_prime,
                              int depth, const PointFunction& boundary,
                              const SolveOptions& options = {},
                              std::size_t node_cap = kDefaultNodeCap);

/// Least-squares fit of log(y) = log(C) - c x; returns {c, C}.
std::pair<double, double> fit_decay(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gsc
