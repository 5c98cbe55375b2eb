#include "gsc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "gsc/errors.hpp"

namespace gsc {

double LatticeDomain::spacing() const {
  return std::pow(static_cast<double>(pattern.scale()), -grid_level);
}

std::optional<std::uint32_t> LatticeDomain::find(std::span<const std::int32_t> c) const {
  const auto d = static_cast<std::size_t>(dim());
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto cmp = std::lexicographical_compare_three_way(
        coords.begin() + static_cast<std::ptrdiff_t>(mid * d),
        coords.begin() + static_cast<std::ptrdiff_t>((mid + 1) * d), c.begin(), c.end());
    if (cmp == 0) return static_cast<std::uint32_t>(mid);
    if (cmp < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return std::nullopt;
}

CellIndex LatticeDomain::cell_of(std::size_t i, int level) const {
  const std::int64_t div = ipow(pattern.scale(), grid_level - level);
  CellIndex c{level, {}};
  for (auto v : node(i)) c.coords.push_back(v / div);
  return c;
}

std::vector<double> LatticeDomain::center(std::size_t i) const {
  const double h = spacing();
  std::vector<double> x;
  for (auto v : node(i)) x.push_back((v + 0.5) * h);
  return x;
}

std::int64_t predicted_nodes(const GscPattern& pattern, int m, int m_prime) {
  return ipow(pattern.mass(), m) * ipow(pattern.scale(), pattern.dim() * (m_prime - m));
}

namespace {

std::uint16_t tags_for(std::span<const std::int32_t> c, std::int64_t last) {
  std::uint16_t t = 0;
  for (std::size_t a = 0; a < c.size(); ++a) {
    if (c[a] == 0) t |= LatticeDomain::tag_bit(static_cast<int>(a), 0);
    if (c[a] == last) t |= LatticeDomain::tag_bit(static_cast<int>(a), 1);
  }
  return t;
}

// Adjacency from sorted coordinates via binary-search lookup of the 2d
// neighbours; neighbour lists come out in ascending id order.
void link(LatticeDomain& dom) {
  const auto d = static_cast<std::size_t>(dom.dim());
  const std::size_t n = dom.size();
  dom.row_ptr.assign(n + 1, 0);
  dom.adj.clear();
  std::vector<std::int32_t> probe(d);
  std::vector<std::uint32_t> nb;
  for (std::size_t i = 0; i < n; ++i) {
    nb.clear();
    const auto c = dom.node(i);
    for (std::size_t a = 0; a < d; ++a)
      for (int delta : {-1, 1}) {
        std::copy(c.begin(), c.end(), probe.begin());
        probe[a] += delta;
        if (auto j = dom.find(probe)) nb.push_back(*j);
      }
    std::sort(nb.begin(), nb.end());
    dom.adj.insert(dom.adj.end(), nb.begin(), nb.end());
    dom.row_ptr[i + 1] = dom.adj.size();
  }
}

}  // namespace

LatticeDomain build_lattice(const GscPattern& pattern, int m, int m_prime, std::size_t node_cap) {
  if (m < 0 || m_prime < m) throw ContractViolation("build_lattice: need m' >= m >= 0");
  const std::int64_t expected = predicted_nodes(pattern, m, m_prime);
  if (expected > static_cast<std::int64_t>(node_cap) ||
      expected > static_cast<std::int64_t>(UINT32_MAX))
    throw SizeLimitError("lattice would have " + std::to_string(expected) +
                         " nodes, above the cap of " + std::to_string(node_cap));
  const int d = pattern.dim();
  const int L = pattern.scale();
  const std::int64_t side = ipow(L, m_prime);
  if (side > INT32_MAX) throw SizeLimitError("grid side exceeds 32-bit coordinates");
  const std::int64_t total = ipow(side, d);

  LatticeDomain dom{pattern, m, m_prime, {}, {}, {}, {}, 1.0};
  dom.conductance = std::pow(static_cast<double>(L), -static_cast<double>((d - 2) * m_prime));
  dom.coords.reserve(static_cast<std::size_t>(expected * d));
  dom.tags.reserve(static_cast<std::size_t>(expected));

  // digit[l][x]: level-(l+1) digit of coordinate x.
  std::vector<std::vector<int>> digit(static_cast<std::size_t>(m),
                                      std::vector<int>(static_cast<std::size_t>(side)));
  for (int l = 0; l < m; ++l) {
    const std::int64_t div = ipow(L, m_prime - l - 1);
    for (std::int64_t x = 0; x < side; ++x)
      digit[static_cast<std::size_t>(l)][static_cast<std::size_t>(x)] = static_cast<int>((x / div) % L);
  }
  std::vector<std::int32_t> c(static_cast<std::size_t>(d), 0);
  std::vector<int> dg(static_cast<std::size_t>(d));
  for (std::int64_t lin = 0; lin < total; ++lin) {
    bool inside = true;
    for (int l = 0; l < m && inside; ++l) {
      for (int a = 0; a < d; ++a)
        dg[static_cast<std::size_t>(a)] =
            digit[static_cast<std::size_t>(l)][static_cast<std::size_t>(c[static_cast<std::size_t>(a)])];
      inside = pattern.kept(dg);
    }
    if (inside) {
      dom.coords.insert(dom.coords.end(), c.begin(), c.end());
      dom.tags.push_back(tags_for(c, side - 1));
    }
    for (int a = d - 1; a >= 0; --a) {
      if (++c[static_cast<std::size_t>(a)] < side) break;
      c[static_cast<std::size_t>(a)] = 0;
    }
  }
  if (static_cast<std::int64_t>(dom.size()) != expected)
    throw ContractViolation("build_lattice: node count mismatch");
  link(dom);
  return dom;
}

LatticeDomain restrict_to_cell(const LatticeDomain& domain, const CellIndex& q) {
  const int n = q.level;
  if (n > domain.domain_level || !in_precarpet(domain.pattern, domain.domain_level, q))
    throw ContractViolation("restrict_to_cell: cell is not a retained cell of F_m");
  const auto d = static_cast<std::size_t>(domain.dim());
  const std::int64_t div = ipow(domain.pattern.scale(), domain.grid_level - n);
  LatticeDomain out{domain.pattern, domain.domain_level - n, domain.grid_level - n, {}, {}, {}, {},
                    1.0};
  out.conductance = std::pow(static_cast<double>(domain.pattern.scale()),
                             -static_cast<double>((domain.dim() - 2) * out.grid_level));
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto c = domain.node(i);
    bool in = true;
    for (std::size_t a = 0; a < d && in; ++a) in = c[a] / div == q.coords[a];
    if (!in) continue;
    for (std::size_t a = 0; a < d; ++a)
      out.coords.push_back(static_cast<std::int32_t>(c[a] - q.coords[a] * div));
  }
  out.tags.resize(out.coords.size() / d);
  for (std::size_t i = 0; i < out.size(); ++i) out.tags[i] = tags_for(out.node(i), div - 1);
  link(out);
  return out;
}

LatticeDomain induced_subgraph(const LatticeDomain& domain, std::span<const std::uint32_t> nodes) {
  LatticeDomain out{domain.pattern, domain.domain_level, domain.grid_level, {}, {}, {}, {},
                    domain.conductance};
  for (auto i : nodes) {
    const auto c = domain.node(i);
    out.coords.insert(out.coords.end(), c.begin(), c.end());
    out.tags.push_back(domain.tags[i]);
  }
  link(out);
  return out;
}

namespace {

void check_outer(const LatticeDomain& domain, const SubFace& f) {
  const std::int64_t last = ipow(domain.pattern.scale(), f.level) - 1;
  const auto c = f.cell.coords[static_cast<std::size_t>(f.axis)];
  if (f.level > domain.grid_level || (f.side == 0 && c != 0) || (f.side == 1 && c != last))
    throw ContractViolation("face_nodes: sub-face does not lie on the outer boundary");
}

}  // namespace

std::vector<std::uint32_t> face_nodes(const LatticeDomain& domain, const SubFace& face) {
  return face_node_groups(domain, {face}).front();
}

std::vector<std::vector<std::uint32_t>> face_node_groups(const LatticeDomain& domain,
                                                         const std::vector<SubFace>& faces) {
  std::vector<std::vector<std::uint32_t>> groups(faces.size());
  if (faces.empty()) return groups;
  const int k = faces.front().level;
  std::map<std::pair<int, std::vector<std::int64_t>>, std::size_t> index;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].level != k) throw ContractViolation("face_node_groups: mixed sub-face levels");
    check_outer(domain, faces[f]);
    auto key = faces[f].cell.coords;
    key[static_cast<std::size_t>(faces[f].axis)] = 0;
    index.emplace(std::pair{2 * faces[f].axis + faces[f].side, std::move(key)}, f);
  }
  const std::int64_t div = ipow(domain.pattern.scale(), domain.grid_level - k);
  const int d = domain.dim();
  std::vector<std::int64_t> key(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (!domain.tags[i]) continue;
    const auto c = domain.node(i);
    for (int a = 0; a < d; ++a)
      for (int s = 0; s < 2; ++s) {
        if (!domain.touches(i, a, s)) continue;
        for (int b = 0; b < d; ++b) key[static_cast<std::size_t>(b)] = c[static_cast<std::size_t>(b)] / div;
        key[static_cast<std::size_t>(a)] = 0;
        if (auto it = index.find({2 * a + s, key}); it != index.end())
          groups[it->second].push_back(static_cast<std::uint32_t>(i));
      }
  }
  return groups;
}

int max_resolved_level(const LatticeDomain& domain) {
  const int d = domain.dim();
  const int m = domain.domain_level;
  const int m_i = dims(domain.pattern).m_I;
  const std::int64_t need = ipow(4, d - 1);
  int best = -1;
  for (int k = 0; k <= domain.grid_level; ++k) {
    const std::int64_t count =
        ipow(m_i, std::max(m - k, 0)) * ipow(domain.pattern.scale(), (d - 1) * (domain.grid_level - std::max(k, m)));
    if (count >= need) best = k;
  }
  return best;
}

bool is_connected(const LatticeDomain& domain) {
  if (domain.size() == 0) return false;
  std::vector<std::uint8_t> seen(domain.size(), 0);
  std::queue<std::uint32_t> todo;
  todo.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const auto i = todo.front();
    todo.pop();
    for (auto j : domain.neighbors(i))
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        todo.push(j);
      }
  }
  return reached == domain.size();
}

}  // namespace gsc
