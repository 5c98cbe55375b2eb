#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsc/lattice.hpp"
#include "gsc/solver.hpp"

namespace gsc {

/// Where 0/1 resistance data is imposed.
///  Face: on the faces of F_0, through half-cell links (conductance 2c) from
///        each boundary cell; reproduces the continuum value (full square: 1).
///  Cell: the boundary cells themselves are pinned (plain cell network).
enum class BoundaryMode { Face, Cell };

struct ResistanceOptions {
  BoundaryMode mode = BoundaryMode::Face;
  SolveOptions solve;
  bool half_factor = false;  // energy carries a factor 1/2
  std::size_t node_cap = kDefaultNodeCap;
};

/// Constraints for f = 0 on {x_axis = 0} and f = 1 on {x_axis = 1}.
Constraints resistance_constraints(const LatticeDomain& domain, int axis, BoundaryMode mode);

struct RawResistance {
  double D = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  double seconds = 0.0;
};

RawResistance raw_resistance(const GscPattern& pattern, int n, int m_prime,
                             const ResistanceOptions& options = {}, int axis = 0);
RawResistance raw_resistance(const LatticeDomain& domain, const ResistanceOptions& options = {},
                             int axis = 0);

struct ResistanceEntry {
  int n = 0;
  int m_prime = 0;
  double D = 0.0;
  double ratio = 0.0;  // D_{n-1} / D_n; NaN for the first row
  double R_hat = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  double seconds = 0.0;
};

struct ResistanceSeries {
  std::vector<ResistanceEntry> entries;  // n = 1..n_max
  double D0 = 1.0;                       // level-0 value used for the first ratio
  double rho_hat = 0.0;
  double rho_regression = 0.0;           // from a log-linear fit of D over the last <= 4 levels
  double rhobar_hat = 0.0;
  double dw_hat = 0.0;
  double ds_hat = 0.0;
  bool complete = true;
  std::string error;                     // set when a level failed
};

/// D_n for n = 1..n_max at m' = n + extra, plus the derived scaling estimates.
ResistanceSeries resistance_series(const GscPattern& pattern, int n_max, int extra,
                                   const ResistanceOptions& options = {});

/// Fills rho_hat and the derived exponents/normalized values from D entries.
void finalize_series(ResistanceSeries& series, const GscPattern& pattern);

/// Factor turning raw lattice energy on F_m into the normalized form energy:
/// (rho * L^{d-2})^m.
double energy_scale(const GscPattern& pattern, int m, double rho_hat);

/// Two-branch weight phi_m(r) with the walk dimension derived from rho_hat.
double phi(const GscPattern& pattern, int m, double r, double rho_hat);
double walk_dimension(const GscPattern& pattern, double rho_hat);

using PointFunction = std::function<double(std::span<const double>)>;

/// sup/inf over B(center, r/2) of the function harmonic in B(center, r) with
/// data `boundary` outside it; nullopt when the infimum is not positive.
std::optional<double> harnack_ratio(const LatticeDomain& domain, std::span<const double> center,
                                    double r, const PointFunction& boundary,
                                    const SolveOptions& options = {});

/// phi_m(r) * (mean-square deviation on B(x, c r)) / (energy on B(x, r)).
/// 0/0 is reported as 0; a zero energy with positive deviation yields +inf.
double poincare_ratio(const LatticeDomain& domain, const std::vector<double>& values,
                      std::span<const double> x, double r, double c, double rho_hat);

}  // namespace gsc
