#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gsc/errors.hpp"
#include "gsc/resistance.hpp"
#include "gsc/solver.hpp"
#include "gsc/util.hpp"
#include "oracles.hpp"

using namespace gsc;

namespace {

oracle::Grid grid_of(const LatticeDomain& dom) {
  oracle::Grid g{dom.dim(), {}};
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const auto c = dom.node(i);
    g.nodes.emplace_back(c.begin(), c.end());
  }
  return g;
}

// Face-mode resistance through the dense oracle.
double dense_face_resistance(const LatticeDomain& dom) {
  const auto n = dom.size();
  std::vector<double> extra(n, 0.0), target(n, 0.0), value(n, 0.0);
  std::vector<bool> pinned(n, false);
  const auto last = dom.side() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = dom.node(i)[0];
    if (x == 0) extra[i] += 2 * dom.conductance;
    if (x == last) {
      extra[i] += 2 * dom.conductance;
      target[i] = 1.0;
    }
  }
  return oracle::min_energy(oracle::laplacian(grid_of(dom), dom.conductance), extra, target, pinned,
                            value);
}

}  // namespace

TEST_CASE("assemble_laplacian structure") {
  const auto full = build_lattice(GscPattern::full_cube(2, 3), 0, 1);
  const std::vector<std::uint32_t> pair{0, 1};
  const auto two = assemble_laplacian(induced_subgraph(full, pair));
  CHECK(two.at(0, 0) == 1.0);
  CHECK(two.at(0, 1) == -1.0);
  CHECK(two.at(1, 0) == -1.0);
  CHECK(two.at(1, 1) == 1.0);

  const auto a = assemble_laplacian(full);
  std::vector<int> deg;
  for (std::size_t i = 0; i < 9; ++i) deg.push_back(static_cast<int>(a.at(i, i)));
  CHECK(deg == std::vector<int>{2, 3, 2, 3, 4, 3, 2, 3, 2});

  for (const auto& dom : {build_lattice(GscPattern::standard_carpet(), 1, 1),
                          build_lattice(GscPattern::standard_carpet(), 2, 3),
                          build_lattice(GscPattern::menger_sponge(), 1, 2)}) {
    const auto lap = assemble_laplacian(dom);
    const auto dense = oracle::laplacian(grid_of(dom), dom.conductance);
    for (std::size_t i = 0; i < lap.size(); ++i) {
      double row = 0;
      for (auto k = lap.row_ptr[i]; k < lap.row_ptr[i + 1]; ++k) {
        row += lap.val[k];
        CHECK(lap.val[k] == doctest::Approx(dense(static_cast<Eigen::Index>(i), lap.col[k])));
        CHECK(lap.at(lap.col[k], i) == lap.val[k]);
      }
      CHECK(std::abs(row) < 1e-15);
    }
  }
  // Standard carpet at m = m' = 1: the 8-ring, every degree 2.
  const auto ring = assemble_laplacian(build_lattice(GscPattern::standard_carpet(), 1, 1));
  for (std::size_t i = 0; i < 8; ++i) CHECK(ring.at(i, i) == 2.0);
}

TEST_CASE("solve_dirichlet examples") {
  SUBCASE("two nodes, one pinned") {
    const auto full = build_lattice(GscPattern::full_cube(2, 3), 0, 1);
    const std::vector<std::uint32_t> pair{0, 1};
    const auto dom = induced_subgraph(full, pair);
    Constraints c(2);
    c.pin(0, 5.0);
    const auto sol = solve_dirichlet(dom, c);
    CHECK(sol.values[1] == doctest::Approx(5.0));
    CHECK(sol.energy == doctest::Approx(0.0));
  }
  SUBCASE("full square is affine with energy 1") {
    for (int mp = 1; mp <= 4; ++mp) {
      const auto dom = build_lattice(GscPattern::full_cube(2, 3), 0, mp);
      const auto sol = solve_dirichlet(dom, resistance_constraints(dom, 0, BoundaryMode::Face));
      CHECK(sol.energy == doctest::Approx(1.0).epsilon(1e-9));
      for (std::size_t i = 0; i < dom.size(); ++i)
        CHECK(sol.values[i] == doctest::Approx(dom.center(i)[0]).epsilon(1e-8));
    }
  }
  SUBCASE("standard carpet ring in cell mode") {
    const auto dom = build_lattice(GscPattern::standard_carpet(), 1, 1);
    const auto sol = solve_dirichlet(dom, resistance_constraints(dom, 0, BoundaryMode::Cell));
    CHECK(std::abs(sol.energy - 1.0) < 1e-10);
    for (std::size_t i = 0; i < dom.size(); ++i)
      if (dom.node(i)[0] == 1) CHECK(sol.values[i] == doctest::Approx(0.5));
  }
  SUBCASE("standard carpet ring in face mode") {
    // Hand reduction: each column-0 / column-2 cube hangs off a terminal of
    // conductance 2; the ring gives 5/7.
    const auto dom = build_lattice(GscPattern::standard_carpet(), 1, 1);
    const auto sol = solve_dirichlet(dom, resistance_constraints(dom, 0, BoundaryMode::Face));
    CHECK(std::abs(sol.energy - 5.0 / 7.0) < 1e-10);
    CHECK(std::abs(dense_face_resistance(dom) - 5.0 / 7.0) < 1e-12);
  }
  SUBCASE("errors") {
    const auto dom = build_lattice(GscPattern::standard_carpet(), 2, 4);
    CHECK_THROWS_AS(solve_dirichlet(dom, Constraints(dom.size())), SolverError);
    SolveOptions tight;
    tight.max_iter = 3;
    try {
      solve_dirichlet(dom, resistance_constraints(dom, 0, BoundaryMode::Face), tight);
      FAIL("expected a solver error");
    } catch (const SolverError& e) {
      CHECK(e.iterations() == 3);
      CHECK(e.residual() > 1e-10);
    }
  }
}

TEST_CASE("CG agrees with the dense direct solve") {
  const auto sc = GscPattern::standard_carpet();
  for (auto [m, mp] : {std::pair{1, 2}, {2, 2}, {2, 3}, {1, 3}}) {
    const auto dom = build_lattice(sc, m, mp);
    const double cg = raw_resistance(dom).D;
    const double direct = dense_face_resistance(dom);
    CHECK(std::abs(cg - direct) <= 1e-9 * direct);
  }
  // Generic data: pinned nodes with pseudo-random values.
  const auto dom = build_lattice(sc, 2, 3);
  Constraints c(dom.size());
  std::vector<bool> pinned(dom.size(), false);
  std::vector<double> value(dom.size(), 0.0);
  for (std::size_t i = 0; i < dom.size(); i += 7) {
    value[i] = counter_uniform(11, i);
    pinned[i] = true;
    c.pin(static_cast<std::uint32_t>(i), value[i]);
  }
  const auto sol = solve_dirichlet(dom, c);
  Eigen::VectorXd x;
  const double e = oracle::min_energy(oracle::laplacian(grid_of(dom)), std::vector<double>(dom.size(), 0.0),
                                      value, pinned, value, &x);
  CHECK(std::abs(sol.energy - e) <= 1e-9 * e);
  for (std::size_t i = 0; i < dom.size(); ++i)
    CHECK(std::abs(sol.values[i] - x(static_cast<Eigen::Index>(i))) < 1e-8);
}

TEST_CASE("maximum principle and energy additivity") {
  const auto sc = GscPattern::standard_carpet();
  const auto dom = build_lattice(sc, 3, 4);
  Constraints c(dom.size());
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < dom.size(); ++i)
    if (dom.tags[i]) {
      const double v = std::sin(7.0 * dom.center(i)[0]) + dom.center(i)[1];
      c.pin(static_cast<std::uint32_t>(i), v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  const auto sol = solve_dirichlet(dom, c);
  for (double v : sol.values) {
    CHECK(v >= lo - 1e-9);
    CHECK(v <= hi + 1e-9);
  }
  for (int level = 0; level <= 4; ++level) {
    CompensatedSum s;
    for (const auto& [cell, e] : per_cell_energy(dom, sol, level)) s.add(e);
    CHECK(std::abs(s.value() - sol.energy) <= 1e-12 * sol.energy);
  }
  // Terminals are attributed to their node's cell as well.
  const auto face = solve_dirichlet(dom, resistance_constraints(dom, 1, BoundaryMode::Face));
  CompensatedSum s;
  for (const auto& [cell, e] : per_cell_energy(dom, face, 2)) s.add(e);
  CHECK(std::abs(s.value() - face.energy) <= 1e-12 * face.energy);
}
