#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gsc/geometry.hpp"
#include "gsc/pattern.hpp"

namespace gsc {

inline constexpr std::size_t kDefaultNodeCap = 2'000'000;

/// Level-m' cells of F_m as a graph. Nodes are stored in lexicographic order of
/// their integer coordinates, so lookups are binary searches.
struct LatticeDomain {
  GscPattern pattern;
  int domain_level = 0;  // m
  int grid_level = 0;    // m'
  std::vector<std::int32_t> coords;     // node i occupies [i*d, (i+1)*d)
  std::vector<std::uint64_t> row_ptr;   // CSR over face-adjacent nodes
  std::vector<std::uint32_t> adj;
  std::vector<std::uint16_t> tags;      // bit 2*axis+side: cube touches {x_axis = side}
  double conductance = 1.0;             // per edge, h^{d-2}

  int dim() const noexcept { return pattern.dim(); }
  std::size_t size() const noexcept { return tags.size(); }
  std::size_t edge_count() const noexcept { return adj.size() / 2; }
  std::int64_t side() const { return ipow(pattern.scale(), grid_level); }
  double spacing() const;

  std::span<const std::int32_t> node(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim()), static_cast<std::size_t>(dim())};
  }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {adj.data() + row_ptr[i], adj.data() + row_ptr[i + 1]};
  }
  std::optional<std::uint32_t> find(std::span<const std::int32_t> c) const;

  static std::uint16_t tag_bit(int axis, int side) {
    return static_cast<std::uint16_t>(1U << (2 * axis + side));
  }
  bool touches(std::size_t i, int axis, int side) const { return tags[i] & tag_bit(axis, side); }

  /// Level-`level` cell containing node i.
  CellIndex cell_of(std::size_t i, int level) const;
  /// Node center in [0,1]^d.
  std::vector<double> center(std::size_t i) const;
};

LatticeDomain build_lattice(const GscPattern& pattern, int m, int m_prime,
                            std::size_t node_cap = kDefaultNodeCap);

/// Expected node count m_F^m L^{d(m'-m)}.
std::int64_t predicted_nodes(const GscPattern& pattern, int m, int m_prime);

/// F_{m,Q} re-based through the inverse chart of Q: a domain of levels
/// (m-n, m'-n).
LatticeDomain restrict_to_cell(const LatticeDomain& domain, const CellIndex& q);

/// Induced subgraph on `nodes` (sorted, unique); coordinates and tags kept.
LatticeDomain induced_subgraph(const LatticeDomain& domain, std::span<const std::uint32_t> nodes);

/// Nodes carrying the sub-face: cubes on the face hyperplane whose projection
/// lies inside the sub-face's extent.
std::vector<std::uint32_t> face_nodes(const LatticeDomain& domain, const SubFace& face);

/// face_nodes for every entry of `faces` in one pass (all must share a level).
std::vector<std::vector<std::uint32_t>> face_node_groups(const LatticeDomain& domain,
                                                         const std::vector<SubFace>& faces);

/// Finest k <= m' at which every sub-face of level k carries >= 4^{d-1} nodes.
int max_resolved_level(const LatticeDomain& domain);

bool is_connected(const LatticeDomain& domain);

}  // namespace gsc
