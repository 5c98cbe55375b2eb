#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsc/pattern.hpp"

namespace gsc {

/// Level-n cube of side L_F^{-n}, addressed by integer coordinates in [0, L_F^n).
struct CellIndex {
  int level = 0;
  std::vector<std::int64_t> coords;

  auto operator<=>(const CellIndex&) const = default;
};

/// Face (axis, side) of a level-k cell lying on the outer boundary of F_0.
struct SubFace {
  int level = 0;
  CellIndex cell;
  int axis = 0;  // 0-based
  int side = 0;  // 0 or 1

  auto operator<=>(const SubFace&) const = default;
};

/// One of the 2d faces {x_axis = side} of F_0.
struct Face {
  int axis = 0;
  int side = 0;
  auto operator<=>(const Face&) const = default;
};

struct AxiomCheck {
  bool pass = true;
  std::string witness;  // empty on pass
};

struct ValidationReport {
  AxiomCheck symmetry;         // SC1
  AxiomCheck connectedness;    // SC2
  AxiomCheck non_diagonality;  // SC3
  AxiomCheck borders;          // SC4
  bool degenerate = false;     // keep-all pattern: F = F_0

  bool valid() const {
    return symmetry.pass && connectedness.pass && non_diagonality.pass && borders.pass;
  }
  /// Name of the first failing axiom, or empty.
  std::string first_failure() const;
};

struct DimensionReport {
  int m_F = 0;
  int m_I = 0;
  double d_f = 0.0;
  double d_I = 0.0;
  // Filled once a resistance estimate exists.
  std::optional<double> rho_hat, rhobar_hat, dw_hat, ds_hat;
};

ValidationReport validate_pattern(const GscPattern& pattern);

/// Brute-force non-diagonality check over every 2^d block of level-n cubes.
AxiomCheck check_nondiagonality(const GscPattern& pattern, int level);

/// True iff the level-`cell.level` cube meets the interior of F_m.
bool in_precarpet(const GscPattern& pattern, int m, const CellIndex& cell);

/// Q_n(F), lexicographically ordered.
std::vector<CellIndex> enumerate_cells(const GscPattern& pattern, int level);
/// Q_n(F_m), lexicographically ordered (equals Q_n(F) when n <= m).
std::vector<CellIndex> enumerate_cells(const GscPattern& pattern, int m, int level);

DimensionReport dims(const GscPattern& pattern);
/// Fills the derived exponents from a resistance scaling estimate.
void attach_scaling(DimensionReport& report, const GscPattern& pattern, double rho_hat);

/// True iff the closed cube touches the boundary of F_0.
bool touches_boundary(const GscPattern& pattern, const CellIndex& cell);

/// B_n(F_m): cells of Q_n(F_m) whose closed cube meets the boundary of F_0.
std::vector<CellIndex> boundary_shell(const GscPattern& pattern, int m, int level);

/// Sub-faces of level k of the outer boundary of F_m, ordered by cell then
/// axis then side.
std::vector<SubFace> subfaces(const GscPattern& pattern, int m, int k);

/// Unordered adjacency pairs (i < j) over `subfaces(pattern, m, k)`.
std::vector<std::pair<std::size_t, std::size_t>> subface_adjacency(const GscPattern& pattern,
                                                                   int m, int k);
bool subfaces_adjacent(const SubFace& a, const SubFace& b, int scale);

enum class Connectivity { Connected, Disconnected, Empty };

/// Connectivity of the level-m cell graph of F_m after removing the cells whose
/// center lies within L_F^{-j}/2 of any face in `faces`.
Connectivity connectivity_check(const GscPattern& pattern, int m, int slab_level,
                                const std::vector<Face>& faces);

}  // namespace gsc
