#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gsc/lattice.hpp"
#include "gsc/solver.hpp"

namespace gsc {

/// Values on {0,1}^{d-1}; corner y sits at index y_0 + 2 y_1 + 4 y_2 + ...
using CornerData = std::vector<double>;

double multilinear_interp(const CornerData& u, std::span<const double> x);

/// Fixed bump prod_i 6 x_i (1 - x_i): unit mean, zero on the cube boundary.
double bump(std::span<const double> x);

/// Multilinear part plus beta times the bump.
struct FaceFunction {
  CornerData corners;
  double beta = 0.0;

  double operator()(std::span<const double> x) const {
    return multilinear_interp(corners, x) + beta * bump(x);
  }
  double mean() const;
};

/// Face function with the corner data's boundary values and mean `a`.
FaceFunction bump_correct(const CornerData& u, double a);

/// A (d-1)-face of a level-`level` cube: {x_axis = plane} with the remaining
/// coordinates of its lower corner in `lower` (entry `axis` equals `plane`),
/// all in level units.
struct AverageFace {
  int level = 0;
  int axis = 0;
  std::int64_t plane = 0;
  std::vector<std::int64_t> lower;

  auto operator<=>(const AverageFace&) const = default;
};

/// Distinct faces Psi_Q(B) for Q in Q_n(F) and B a level-m sub-face of the
/// outer boundary of F_m, ordered by (axis, plane, lower corner).
std::vector<AverageFace> average_faces(const GscPattern& pattern, int n, int m);

struct GluedData {
  Constraints constraints;
  std::vector<FaceFunction> functions;  // one per face
  std::vector<std::vector<std::uint32_t>> face_nodes;
};

/// Steps 1-2: corner values from incident targets, bump-corrected face
/// functions, sampled onto every node touching a face (mean over faces).
GluedData glue_faces(const LatticeDomain& domain, const std::vector<AverageFace>& faces,
                     const std::vector<double>& targets);

struct PrescribedExtension {
  LatticeDomain domain;
  std::vector<AverageFace> faces;
  std::vector<double> targets;
  std::vector<double> achieved;
  double quadrature_error = 0.0;  // max |achieved - target|
  double interior_residual = 0.0; // max |Laplacian| at free nodes, relative
  HarmonicSolution solution;
};

/// Function on F_{n+m} (grid m') with the given averages on the faces in
/// average_faces(pattern, n, m), harmonic away from them.
PrescribedExtension prescribe_averages(const GscPattern& pattern, int n, int m,
                                       const std::vector<double>& targets, int m_prime,
                                       const SolveOptions& options = {},
                                       std::size_t node_cap = kDefaultNodeCap);

struct CutoffResult {
  HarmonicSolution solution;
  double energy = 0.0;  // raw lattice energy
  std::size_t one_nodes = 0;
  std::size_t zero_nodes = 0;
};

/// 1 on the cell, 0 on level-n cells not meeting it, harmonic in between.
CutoffResult cutoff(const LatticeDomain& domain, const CellIndex& cell,
                    const SolveOptions& options = {});

/// Harmonic function with the given values on every node touching the outer
/// boundary (`data` is read only at those nodes).
HarmonicSolution harmonic_extension(const LatticeDomain& domain, const std::vector<double>& data,
                                    const SolveOptions& options = {});

/// Boundary data from seeded random averages on the level-1 outer faces,
/// glued as in prescribe_averages. Values outside the boundary are zero.
std::vector<double> random_boundary_data(const LatticeDomain& domain, std::uint64_t seed);

}  // namespace gsc
