#include "gsc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "gsc/errors.hpp"

namespace gsc {

namespace {

std::string describe(std::span<const int> idx) {
  std::ostringstream s;
  s << '(';
  for (std::size_t i = 0; i < idx.size(); ++i) s << (i ? "," : "") << idx[i];
  s << ')';
  return s.str();
}

// Face-adjacency connectivity of the kept cubes in a box of `extent` cubes per
// axis; `kept` is indexed row-major. Returns true when the kept set is empty.
bool face_connected(const std::vector<std::uint8_t>& kept, int dim, int extent) {
  const std::size_t total = kept.size();
  std::size_t start = total;
  std::size_t count = 0;
  for (std::size_t i = 0; i < total; ++i)
    if (kept[i]) {
      ++count;
      if (start == total) start = i;
    }
  if (count == 0) return true;
  std::vector<std::uint8_t> seen(total, 0);
  std::queue<std::size_t> todo;
  todo.push(start);
  seen[start] = 1;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const std::size_t cur = todo.front();
    todo.pop();
    std::size_t stride = 1;
    for (int axis = dim - 1; axis >= 0; --axis) {
      const auto coord = static_cast<int>((cur / stride) % static_cast<std::size_t>(extent));
      for (int delta : {-1, 1}) {
        const int nc = coord + delta;
        if (nc < 0 || nc >= extent) continue;
        const std::size_t nb = delta > 0 ? cur + stride : cur - stride;
        if (kept[nb] && !seen[nb]) {
          seen[nb] = 1;
          ++reached;
          todo.push(nb);
        }
      }
      stride *= static_cast<std::size_t>(extent);
    }
  }
  return reached == count;
}

bool f1_contains(const GscPattern& p, int level, std::span<const std::int64_t> coords) {
  std::vector<int> digits(coords.size());
  const std::int64_t div = ipow(p.scale(), level - 1);
  for (std::size_t i = 0; i < coords.size(); ++i) digits[i] = static_cast<int>(coords[i] / div);
  return p.kept(digits);
}

}  // namespace

std::string ValidationReport::first_failure() const {
  if (!symmetry.pass) return "Symmetry";
  if (!connectedness.pass) return "Connectedness";
  if (!non_diagonality.pass) return "Non-diagonality";
  if (!borders.pass) return "Borders included";
  return {};
}

AxiomCheck check_nondiagonality(const GscPattern& pattern, int level) {
  if (level < 1) throw ContractViolation("non-diagonality check needs level >= 1");
  const int d = pattern.dim();
  const std::int64_t side = ipow(pattern.scale(), level);
  const std::int64_t starts = side - 1;
  const std::int64_t nblocks = ipow(starts, d);
  std::vector<std::int64_t> base(static_cast<std::size_t>(d));
  std::vector<std::int64_t> cube(static_cast<std::size_t>(d));
  std::vector<std::uint8_t> kept(static_cast<std::size_t>(1) << d);
  for (std::int64_t b = 0; b < nblocks; ++b) {
    std::int64_t rest = b;
    for (int i = d - 1; i >= 0; --i) {
      base[static_cast<std::size_t>(i)] = rest % starts;
      rest /= starts;
    }
    for (std::size_t corner = 0; corner < kept.size(); ++corner) {
      for (int i = 0; i < d; ++i)
        cube[static_cast<std::size_t>(i)] =
            base[static_cast<std::size_t>(i)] + static_cast<std::int64_t>((corner >> (d - 1 - i)) & 1U);
      kept[corner] = f1_contains(pattern, level, cube) ? 1 : 0;
    }
    if (!face_connected(kept, d, 2)) {
      std::ostringstream s;
      s << "level-" << level << " block at (";
      for (int i = 0; i < d; ++i) s << (i ? "," : "") << base[static_cast<std::size_t>(i)];
      s << ") has disconnected interior";
      return {false, s.str()};
    }
  }
  return {};
}

ValidationReport validate_pattern(const GscPattern& pattern) {
  ValidationReport report;
  const int d = pattern.dim();
  const int L = pattern.scale();
  report.degenerate = pattern.mass() == static_cast<int>(pattern.cell_count());

  // SC1: all signed axis permutations.
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> image(static_cast<std::size_t>(d));
  do {
    for (unsigned flips = 0; flips < (1U << d) && report.symmetry.pass; ++flips) {
      for (std::size_t lin = 0; lin < pattern.cell_count(); ++lin) {
        const auto idx = pattern.digits_of(lin);
        for (int k = 0; k < d; ++k) {
          const int v = idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
          image[static_cast<std::size_t>(k)] = ((flips >> k) & 1U) ? L - 1 - v : v;
        }
        if (pattern.kept(lin) != pattern.kept(image)) {
          report.symmetry = {false, "cell " + describe(idx) + " maps to " + describe(image) +
                                        " with different retention"};
          break;
        }
      }
    }
  } while (report.symmetry.pass && std::next_permutation(perm.begin(), perm.end()));

  // SC2
  if (pattern.mass() == 0 || !face_connected(pattern.mask(), d, L))
    report.connectedness = {false, "retained level-1 cubes do not form a face-connected set"};

  // SC3 at level 1; deeper levels follow by self-similarity.
  report.non_diagonality = check_nondiagonality(pattern, 1);

  // SC4: the segment {x_2 = ... = x_d = 0}.
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < L; ++i) {
    idx[0] = i;
    if (!pattern.kept(idx)) {
      report.borders = {false, "cell " + describe(idx) + " on the x_1 axis segment is removed"};
      break;
    }
  }
  return report;
}

bool in_precarpet(const GscPattern& pattern, int m, const CellIndex& cell) {
  const int d = pattern.dim();
  std::vector<int> digits(static_cast<std::size_t>(d));
  const int depth = std::min(m, cell.level);
  for (int l = 1; l <= depth; ++l) {
    const std::int64_t div = ipow(pattern.scale(), cell.level - l);
    for (int i = 0; i < d; ++i)
      digits[static_cast<std::size_t>(i)] =
          static_cast<int>((cell.coords[static_cast<std::size_t>(i)] / div) % pattern.scale());
    if (!pattern.kept(digits)) return false;
  }
  return true;
}

std::vector<CellIndex> enumerate_cells(const GscPattern& pattern, int m, int level) {
  if (level < 0 || m < 0) throw ContractViolation("enumerate_cells: negative level");
  const int d = pattern.dim();
  const int L = pattern.scale();
  std::vector<CellIndex> cur{CellIndex{0, std::vector<std::int64_t>(static_cast<std::size_t>(d), 0)}};
  for (int l = 1; l <= level; ++l) {
    std::vector<CellIndex> next;
    const bool masked = l <= m;
    next.reserve(cur.size() * static_cast<std::size_t>(masked ? pattern.mass() : pattern.cell_count()));
    for (const auto& c : cur)
      for (std::size_t lin = 0; lin < pattern.cell_count(); ++lin) {
        if (masked && !pattern.kept(lin)) continue;
        const auto digit = pattern.digits_of(lin);
        CellIndex child{l, c.coords};
        for (int i = 0; i < d; ++i)
          child.coords[static_cast<std::size_t>(i)] =
              child.coords[static_cast<std::size_t>(i)] * L + digit[static_cast<std::size_t>(i)];
        next.push_back(std::move(child));
      }
    cur = std::move(next);
  }
  std::sort(cur.begin(), cur.end());
  return cur;
}

std::vector<CellIndex> enumerate_cells(const GscPattern& pattern, int level) {
  return enumerate_cells(pattern, level, level);
}

DimensionReport dims(const GscPattern& pattern) {
  DimensionReport r;
  const int d = pattern.dim();
  const int L = pattern.scale();
  r.m_F = pattern.mass();
  std::optional<int> mi;
  for (int axis = 0; axis < d; ++axis)
    for (int side = 0; side < 2; ++side) {
      int count = 0;
      for (std::size_t lin = 0; lin < pattern.cell_count(); ++lin) {
        if (!pattern.kept(lin)) continue;
        const auto idx = pattern.digits_of(lin);
        if (idx[static_cast<std::size_t>(axis)] == (side ? L - 1 : 0)) ++count;
      }
      if (mi && *mi != count)
        throw ContractViolation("dims: face counts differ; pattern is not symmetric");
      mi = count;
    }
  r.m_I = *mi;
  r.d_f = std::log(static_cast<double>(r.m_F)) / std::log(static_cast<double>(L));
  r.d_I = std::log(static_cast<double>(r.m_I)) / std::log(static_cast<double>(L));
  return r;
}

void attach_scaling(DimensionReport& report, const GscPattern& pattern, double rho_hat) {
  const double L = pattern.scale();
  report.rho_hat = rho_hat;
  report.rhobar_hat = rho_hat * report.m_F / (L * L);
  report.dw_hat = std::log(rho_hat * report.m_F) / std::log(L);
  report.ds_hat = 2.0 * report.d_f / *report.dw_hat;
}

bool touches_boundary(const GscPattern& pattern, const CellIndex& cell) {
  const std::int64_t last = ipow(pattern.scale(), cell.level) - 1;
  return std::any_of(cell.coords.begin(), cell.coords.end(),
                     [last](std::int64_t c) { return c == 0 || c == last; });
}

std::vector<CellIndex> boundary_shell(const GscPattern& pattern, int m, int level) {
  auto cells = enumerate_cells(pattern, m, level);
  std::erase_if(cells, [&](const CellIndex& c) { return !touches_boundary(pattern, c); });
  return cells;
}

std::vector<SubFace> subfaces(const GscPattern& pattern, int m, int k) {
  if (k < 0) throw ContractViolation("subfaces: k must be >= 0");
  const int d = pattern.dim();
  const std::int64_t last = ipow(pattern.scale(), k) - 1;
  std::vector<SubFace> out;
  for (const auto& cell : enumerate_cells(pattern, m, k))
    for (int axis = 0; axis < d; ++axis)
      for (int side = 0; side < 2; ++side) {
        const std::int64_t c = cell.coords[static_cast<std::size_t>(axis)];
        if ((side == 0 && c == 0) || (side == 1 && c == last))
          out.push_back(SubFace{k, cell, axis, side});
      }
  return out;
}

bool subfaces_adjacent(const SubFace& a, const SubFace& b, int scale) {
  if (a == b || a.level != b.level) return false;
  const std::size_t d = a.cell.coords.size();
  // Closed boxes in level-k integer units.
  bool intersect = true;
  for (std::size_t i = 0; i < d && intersect; ++i) {
    const std::int64_t alo = a.cell.coords[i] + (static_cast<int>(i) == a.axis ? a.side : 0);
    const std::int64_t ahi = a.cell.coords[i] + (static_cast<int>(i) == a.axis ? a.side : 1);
    const std::int64_t blo = b.cell.coords[i] + (static_cast<int>(i) == b.axis ? b.side : 0);
    const std::int64_t bhi = b.cell.coords[i] + (static_cast<int>(i) == b.axis ? b.side : 1);
    intersect = alo <= bhi && blo <= ahi;
  }
  if (intersect) return true;
  if (a.level == 0 || a.axis != b.axis || a.side != b.side) return false;
  for (std::size_t i = 0; i < d; ++i)
    if (a.cell.coords[i] / scale != b.cell.coords[i] / scale) return false;
  return true;
}

std::vector<std::pair<std::size_t, std::size_t>> subface_adjacency(const GscPattern& pattern,
                                                                   int m, int k) {
  if (k < 1) throw ContractViolation("subface_adjacency: k must be >= 1");
  const auto faces = subfaces(pattern, m, k);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < faces.size(); ++i)
    for (std::size_t j = i + 1; j < faces.size(); ++j)
      if (subfaces_adjacent(faces[i], faces[j], pattern.scale())) edges.emplace_back(i, j);
  return edges;
}

Connectivity connectivity_check(const GscPattern& pattern, int m, int slab_level,
                                const std::vector<Face>& faces) {
  if (slab_level < 1) throw ContractViolation("connectivity_check: j must be >= 1");
  const int L = pattern.scale();
  const std::int64_t side = ipow(L, m);
  // 2c+1 < L^{m-j}, evaluated as (2c+1) * L^{j} < L^{m} to stay in integers.
  const std::int64_t lj = ipow(L, slab_level);
  auto cells = enumerate_cells(pattern, m, m);
  std::erase_if(cells, [&](const CellIndex& c) {
    for (const auto& f : faces) {
      const std::int64_t x = c.coords[static_cast<std::size_t>(f.axis)];
      const std::int64_t dist = f.side == 0 ? x : side - 1 - x;
      if ((2 * dist + 1) * lj < side) return true;
    }
    return false;
  });
  if (cells.empty()) return Connectivity::Empty;
  std::vector<std::uint8_t> seen(cells.size(), 0);
  std::queue<std::size_t> todo;
  todo.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const auto cur = todo.front();
    todo.pop();
    for (std::size_t axis = 0; axis < cells[cur].coords.size(); ++axis)
      for (int delta : {-1, 1}) {
        CellIndex nb = cells[cur];
        nb.coords[axis] += delta;
        const auto it = std::lower_bound(cells.begin(), cells.end(), nb);
        if (it == cells.end() || *it != nb) continue;
        const auto j = static_cast<std::size_t>(it - cells.begin());
        if (!seen[j]) {
          seen[j] = 1;
          ++reached;
          todo.push(j);
        }
      }
  }
  return reached == cells.size() ? Connectivity::Connected : Connectivity::Disconnected;
}

}  // namespace gsc
