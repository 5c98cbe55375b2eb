#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// the library's adjacency or solver code.

#include <Eigen/Dense>

#include <cstdint>
#include <cstdlib>
#include <vector>

namespace oracle {

struct Grid {
  int dim = 2;
  std::vector<std::vector<int>> nodes;
};

inline bool face_adjacent(const std::vector<int>& a, const std::vector<int>& b) {
  int diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += std::abs(a[i] - b[i]);
  return diff == 1;
}

inline int edge_count(const Grid& g) {
  int e = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j) e += face_adjacent(g.nodes[i], g.nodes[j]);
  return e;
}

/// Dense Laplacian with unit conductance, O(N^2) pair scan.
inline Eigen::MatrixXd laplacian(const Grid& g, double c = 1.0) {
  const auto n = static_cast<Eigen::Index>(g.nodes.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (face_adjacent(g.nodes[static_cast<std::size_t>(i)], g.nodes[static_cast<std::size_t>(j)])) {
        a(i, j) = a(j, i) = -c;
        a(i, i) += c;
        a(j, j) += c;
      }
  return a;
}

/// Minimum of x^T A x + sum_k g_k (x_k - v_k)^2 with some entries pinned.
/// diag_extra / target encode terminal links; pinned[k] fixes x_k = value[k].
inline double min_energy(const Eigen::MatrixXd& a, const std::vector<double>& diag_extra,
                         const std::vector<double>& target, const std::vector<bool>& pinned,
                         const std::vector<double>& value, Eigen::VectorXd* out = nullptr) {
  const auto n = a.rows();
  std::vector<Eigen::Index> fr;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!pinned[static_cast<std::size_t>(i)]) fr.push_back(i);
  Eigen::MatrixXd af(fr.size(), fr.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fr.size()));
  for (std::size_t p = 0; p < fr.size(); ++p) {
    const auto i = fr[p];
    for (std::size_t q = 0; q < fr.size(); ++q) af(p, q) = a(i, fr[q]);
    af(p, p) += diag_extra[static_cast<std::size_t>(i)];
    b(p) += diag_extra[static_cast<std::size_t>(i)] * target[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j)
      if (pinned[static_cast<std::size_t>(j)]) b(p) -= a(i, j) * value[static_cast<std::size_t>(j)];
  }
  Eigen::VectorXd xf = af.ldlt().solve(b);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = value[static_cast<std::size_t>(i)];
  for (std::size_t p = 0; p < fr.size(); ++p) x(fr[p]) = xf(p);
  double e = x.dot(a * x);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dv = x(i) - target[static_cast<std::size_t>(i)];
    e += diag_extra[static_cast<std::size_t>(i)] * dv * dv;
  }
  if (out) *out = x;
  return e;
}

/// Level-n cells of the pre-carpet by direct digit test on every cube of the
/// L^n grid (d = 2 only).
inline std::vector<std::vector<int>> carpet_cells_2d(const std::vector<std::vector<int>>& removed,
                                                     int L, int m, int level) {
  std::vector<std::vector<int>> out;
  int side = 1;
  for (int i = 0; i < level; ++i) side *= L;
  for (int x = 0; x < side; ++x)
    for (int y = 0; y < side; ++y) {
      bool in = true;
      int div = side;
      for (int l = 1; l <= level && l <= m; ++l) {
        div /= L;
        const int dx = (x / div) % L, dy = (y / div) % L;
        for (const auto& r : removed)
          if (r[0] == dx && r[1] == dy) in = false;
      }
      if (in) out.push_back({x, y});
    }
  return out;
}

}  // namespace oracle
