#include "gsc/extension.hpp"

#include <cmath>
#include <map>
#include <set>

#include "gsc/errors.hpp"
#include "gsc/util.hpp"

namespace gsc {

double multilinear_interp(const CornerData& u, std::span<const double> x) {
  const std::size_t k = x.size();
  if (u.size() != (std::size_t{1} << k))
    throw ContractViolation("multilinear_interp: need 2^(d-1) corner values");
  double v = 0.0;
  for (std::size_t y = 0; y < u.size(); ++y) {
    double w = 1.0;
    for (std::size_t i = 0; i < k; ++i) w *= ((y >> i) & 1U) ? x[i] : 1.0 - x[i];
    v += u[y] * w;
  }
  return v;
}

double bump(std::span<const double> x) {
  double w = 1.0;
  for (double t : x) w *= 6.0 * t * (1.0 - t);
  return w;
}

double FaceFunction::mean() const {
  CompensatedSum s;
  for (double c : corners) s.add(c);
  return s.value() / static_cast<double>(corners.size()) + beta;
}

FaceFunction bump_correct(const CornerData& u, double a) {
  CompensatedSum s;
  for (double c : u) s.add(a - c);
  return {u, s.value() / static_cast<double>(u.size())};
}

std::vector<AverageFace> average_faces(const GscPattern& pattern, int n, int m) {
  if (n < 0 || m < 0) throw ContractViolation("average_faces: negative level");
  const std::int64_t scale = ipow(pattern.scale(), m);
  std::set<AverageFace> faces;
  const auto outer = subfaces(pattern, m, m);
  for (const auto& q : enumerate_cells(pattern, n))
    for (const auto& b : outer) {
      AverageFace f{n + m, b.axis, 0, {}};
      for (std::size_t a = 0; a < q.coords.size(); ++a)
        f.lower.push_back(q.coords[a] * scale + b.cell.coords[a]);
      f.plane = f.lower[static_cast<std::size_t>(b.axis)] + b.side;
      f.lower[static_cast<std::size_t>(b.axis)] = f.plane;
      faces.insert(std::move(f));
    }
  return {faces.begin(), faces.end()};
}

namespace {

// Global lattice point of corner y of a face.
std::vector<std::int64_t> corner_point(const AverageFace& f, std::size_t y) {
  auto p = f.lower;
  std::size_t bit = 0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (static_cast<int>(a) == f.axis) continue;
    p[a] += static_cast<std::int64_t>((y >> bit) & 1U);
    ++bit;
  }
  return p;
}

}  // namespace

GluedData glue_faces(const LatticeDomain& domain, const std::vector<AverageFace>& faces,
                     const std::vector<double>& targets) {
  if (targets.size() != faces.size())
    throw InputError("expected " + std::to_string(faces.size()) + " targets, got " +
                     std::to_string(targets.size()));
  GluedData out{Constraints(domain.size()), {}, std::vector<std::vector<std::uint32_t>>(faces.size())};
  if (faces.empty()) return out;
  const int level = faces.front().level;
  if (level > domain.grid_level) throw ResolutionError("grid too coarse for the faces; increase m'");
  const auto d = static_cast<std::size_t>(domain.dim());
  const std::size_t ncorner = std::size_t{1} << (d - 1);

  // Step 1: corner values as equal-weight means over incident faces.
  std::map<std::vector<std::int64_t>, std::pair<CompensatedSum, int>> vertex;
  for (std::size_t f = 0; f < faces.size(); ++f)
    for (std::size_t y = 0; y < ncorner; ++y) {
      auto& v = vertex[corner_point(faces[f], y)];
      v.first.add(targets[f]);
      ++v.second;
    }
  // Step 2: bump-corrected face functions.
  std::map<std::pair<int, std::vector<std::int64_t>>, std::size_t> index;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    CornerData u(ncorner);
    for (std::size_t y = 0; y < ncorner; ++y) {
      const auto& v = vertex.at(corner_point(faces[f], y));
      u[y] = v.first.value() / v.second;
    }
    out.functions.push_back(bump_correct(u, targets[f]));
    index.emplace(std::pair{faces[f].axis, faces[f].lower}, f);
  }
  // Sample at node-center projections.
  const std::int64_t s = ipow(domain.pattern.scale(), domain.grid_level - level);
  std::vector<CompensatedSum> sum(domain.size());
  std::vector<int> count(domain.size(), 0);
  std::vector<std::int64_t> key(d);
  std::vector<double> t(d - 1);
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto c = domain.node(i);
    for (std::size_t a = 0; a < d; ++a)
      for (int up = 0; up < 2; ++up) {
        const std::int64_t edge = c[a] + up;
        if (edge % s != 0) continue;
        for (std::size_t b = 0; b < d; ++b) key[b] = c[b] / s;
        key[a] = edge / s;
        const auto it = index.find({static_cast<int>(a), key});
        if (it == index.end()) continue;
        std::size_t j = 0;
        for (std::size_t b = 0; b < d; ++b)
          if (b != a) t[j++] = ((c[b] + 0.5) - static_cast<double>(key[b] * s)) / static_cast<double>(s);
        sum[i].add(out.functions[it->second](t));
        ++count[i];
        out.face_nodes[it->second].push_back(static_cast<std::uint32_t>(i));
      }
  }
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (count[i]) out.constraints.pin(static_cast<std::uint32_t>(i), sum[i].value() / count[i]);
  return out;
}

PrescribedExtension prescribe_averages(const GscPattern& pattern, int n, int m,
                                       const std::vector<double>& targets, int m_prime,
                                       const SolveOptions& options, std::size_t node_cap) {
  if (m_prime < n + m) throw ResolutionError("prescribe_averages: need m' >= n + m");
  PrescribedExtension out{build_lattice(pattern, n + m, m_prime, node_cap), average_faces(pattern, n, m),
                          targets, {}, 0.0, 0.0, {}};
  auto glued = glue_faces(out.domain, out.faces, targets);
  out.solution = solve_dirichlet(out.domain, glued.constraints, options);
  const auto& x = out.solution.values;
  for (std::size_t f = 0; f < out.faces.size(); ++f) {
    if (glued.face_nodes[f].empty()) throw ResolutionError("face carries no nodes; increase m'");
    CompensatedSum s;
    for (auto i : glued.face_nodes[f]) s.add(x[i]);
    out.achieved.push_back(s.value() / static_cast<double>(glued.face_nodes[f].size()));
    out.quadrature_error = std::max(out.quadrature_error, std::abs(out.achieved[f] - targets[f]));
  }
  double scale = 0.0, worst = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < out.domain.size(); ++i) {
    if (glued.constraints.fixed[i]) continue;
    double lap = 0.0;
    for (auto j : out.domain.neighbors(i)) lap += x[i] - x[j];
    worst = std::max(worst, std::abs(lap));
  }
  out.interior_residual = scale > 0 ? worst / scale : worst;
  return out;
}

CutoffResult cutoff(const LatticeDomain& domain, const CellIndex& cell, const SolveOptions& options) {
  const int n = cell.level;
  if (n < 1 || n > domain.domain_level || !in_precarpet(domain.pattern, domain.domain_level, cell))
    throw ContractViolation("cutoff: cell must be retained with 1 <= n <= m");
  Constraints cons(domain.size());
  CutoffResult out;
  const auto d = static_cast<std::size_t>(domain.dim());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto q = domain.cell_of(i, n);
    std::int64_t cheb = 0;
    for (std::size_t a = 0; a < d; ++a) cheb = std::max(cheb, std::abs(q.coords[a] - cell.coords[a]));
    if (cheb == 0) {
      cons.pin(static_cast<std::uint32_t>(i), 1.0);
      ++out.one_nodes;
    } else if (cheb > 1) {
      cons.pin(static_cast<std::uint32_t>(i), 0.0);
      ++out.zero_nodes;
    }
  }
  if (out.zero_nodes == 0) throw ContractViolation("cutoff: every cell meets the target cell");
  out.solution = solve_dirichlet(domain, cons, options);
  out.energy = out.solution.energy;
  return out;
}

HarmonicSolution harmonic_extension(const LatticeDomain& domain, const std::vector<double>& data,
                                    const SolveOptions& options) {
  if (data.size() != domain.size()) throw ContractViolation("harmonic_extension: data size mismatch");
  Constraints cons(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (domain.tags[i]) cons.pin(static_cast<std::uint32_t>(i), data[i]);
  return solve_dirichlet(domain, cons, options);
}

std::vector<double> random_boundary_data(const LatticeDomain& domain, std::uint64_t seed) {
  if (domain.domain_level < 1 || domain.grid_level < 1)
    throw ContractViolation("random_boundary_data: need m >= 1");
  const auto faces = average_faces(domain.pattern, 0, 1);
  std::vector<double> targets(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) targets[f] = counter_uniform(seed, f);
  const auto glued = glue_faces(domain, faces, targets);
  std::vector<double> out(domain.size(), 0.0);
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (glued.constraints.fixed[i]) out[i] = glued.constraints.value[i];
  return out;
}

}  // namespace gsc
