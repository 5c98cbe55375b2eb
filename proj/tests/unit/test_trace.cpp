#include <doctest.h>

#include <cmath>

#include "gsc/errors.hpp"
#include "gsc/extension.hpp"
#include "gsc/trace.hpp"

using namespace gsc;

namespace {

std::vector<double> coordinate(const LatticeDomain& dom, int axis) {
  std::vector<double> v(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i) v[i] = dom.center(i)[static_cast<std::size_t>(axis)];
  return v;
}

}  // namespace

TEST_CASE("sub-face averages") {
  const auto dom = build_lattice(GscPattern::full_cube(2, 3), 0, 3);
  const std::vector<double> c(dom.size(), 2.5);
  for (const auto& f : subfaces(dom.pattern, 0, 1)) CHECK(subface_average(dom, c, f) == doctest::Approx(2.5));
  const auto x1 = coordinate(dom, 0);
  const double h = dom.spacing();
  CHECK(subface_average(dom, x1, SubFace{0, {0, {0, 0}}, 0, 1}) == doctest::Approx(1 - h / 2));
  CHECK(subface_average(dom, x1, SubFace{1, {1, {1, 0}}, 1, 0}) == doctest::Approx(0.5));

  // Resolution error when a sub-face is finer than the grid.
  const auto coarse = build_lattice(GscPattern::standard_carpet(), 1, 1);
  CHECK_THROWS_AS(subface_averages(coarse, std::vector<double>(8, 0.0), 2), ContractViolation);

  const auto sc = build_lattice(GscPattern::standard_carpet(), 2, 3);
  const auto sol = solve_dirichlet(sc, resistance_constraints(sc, 0, BoundaryMode::Cell));
  for (const auto& f : subfaces(sc.pattern, 2, 1))
    if (f.axis == 0 && f.side == 0) CHECK(subface_average(sc, sol.values, f) == 0.0);
}

TEST_CASE("I_1 of the x_1 trace on the full square") {
  const auto dom = build_lattice(GscPattern::full_cube(2, 3), 0, 3);
  const double h = dom.spacing();
  const auto x1 = coordinate(dom, 0);
  // 16 adjacent pairs: three within each side, four at the corners.
  const double expected = 2 * (6.0 / 9.0) + 4 * std::pow(1.0 / 6 - h / 2, 2);
  CHECK(discrete_energy_I(dom, x1, 1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(subface_adjacency(dom.pattern, 0, 1).size() == 16);
}

TEST_CASE("Besov invariants") {
  const auto dom = build_lattice(GscPattern::standard_carpet(), 3, 4);
  const auto sol = harmonic_extension(dom, random_boundary_data(dom, 7));
  const double rho = 1.25;
  std::vector<double> doubled(sol.values), shifted(sol.values), negated(sol.values);
  for (auto& v : doubled) v *= 2;
  for (auto& v : shifted) v += 3.25;
  for (auto& v : negated) v = -v;
  for (int k = 1; k <= 2; ++k) {
    const double ik = discrete_energy_I(dom, sol.values, k);
    CHECK(ik > 0);
    CHECK(discrete_energy_I(dom, std::vector<double>(dom.size(), 4.0), k) == 0.0);
    CHECK(std::abs(discrete_energy_I(dom, doubled, k) - 4 * ik) <= 1e-10 * ik);
    CHECK(std::abs(discrete_energy_I(dom, negated, k) - ik) <= 1e-10 * ik);
    CHECK(std::abs(discrete_energy_I(dom, shifted, k) - ik) <= 1e-9 * ik);
  }
  const auto prof = besov_profile(dom, sol.values, rho);
  CHECK(prof.k_max == 2);
  CHECK_FALSE(prof.truncated);
  for (int n = 1; n < prof.k_max; ++n) CHECK(prof.lambda(n) >= prof.lambda(n + 1));
  CHECK(prof.tail() == prof.terms.back().term);
  CHECK(lambda_energy(dom, std::vector<double>(dom.size(), 1.0), 1, rho) == 0.0);
  const auto over = besov_profile(dom, sol.values, rho, 6);
  CHECK(over.truncated);
  CHECK(over.k_max == 2);
}

TEST_CASE("full square: x_1 profile and ratios") {
  const auto dom = build_lattice(GscPattern::full_cube(2, 3), 0, 4);
  const auto sol = harmonic_extension(dom, coordinate(dom, 0));
  const double h = dom.spacing();
  for (std::size_t i = 0; i < dom.size(); ++i) CHECK(sol.values[i] == doctest::Approx(dom.center(i)[0]));
  CHECK(sol.energy == doctest::Approx(1 - h));

  // Uniform density: each node carries h^2 per incident horizontal edge / 2.
  const auto shells = shell_energy_profile(dom, sol.node_energy, 3);
  CHECK(shells.entries[0].cumulative == doctest::Approx(sol.energy));
  const int side = 81;
  for (int k = 0; k <= 3; ++k) {
    const int w = side / static_cast<int>(std::pow(3, k));
    double oracle = 0;
    for (int x = 0; x < side; ++x)
      for (int y = 0; y < side; ++y) {
        const bool in_shell = x < w || y < w || x >= side - w || y >= side - w;
        if (in_shell) oracle += h * h * ((x == 0 || x == side - 1) ? 0.5 : 1.0);
      }
    CHECK(shells.entries[static_cast<std::size_t>(k)].cumulative == doctest::Approx(oracle).epsilon(1e-9));
  }
  for (std::size_t k = 1; k < shells.entries.size(); ++k)
    CHECK(shells.entries[k].cumulative <= shells.entries[k - 1].cumulative);

  const auto prof = besov_profile(dom, sol.values, 1.0);
  for (int n = 1; n <= 2; ++n) {
    const auto r = trace_ratio(dom, sol, n, 1.0, prof);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0);
    CHECK(r.numerator == doctest::Approx(prof.lambda(n)));
    CHECK(r.denominator == doctest::Approx(shells.entries[static_cast<std::size_t>(n - 1)].cumulative));
  }
  const auto e = extension_ratio(dom, sol, 1.0, prof);
  CHECK(e.ratio == doctest::Approx(sol.energy / prof.lambda(1)));

  const std::vector<double> flat(dom.size(), 0.7);
  const auto cst = harmonic_extension(dom, flat);
  const auto cprof = besov_profile(dom, cst.values, 1.0);
  CHECK(trace_ratio(dom, cst, 1, 1.0, cprof).ratio == 0.0);
  CHECK(extension_ratio(dom, cst, 1.0, cprof).ratio == 0.0);
  CHECK_FALSE(extension_ratio(dom, cst, 1.0, cprof).violation);
}

TEST_CASE("decay experiment") {
  const auto sc = GscPattern::standard_carpet();
  const auto flat = decay_experiment(sc, CellIndex{1, {0, 1}}, 3, 3, 2, [](auto) { return 1.0; });
  CHECK(flat.degenerate);

  // Full square, x_1 data, an interior level-2 cell: the neighbourhood is a
  // 3x3 block of level-2 cells and the solution stays linear.
  const auto full = GscPattern::full_cube(2, 3);
  const auto lin = decay_experiment(full, CellIndex{2, {4, 4}}, 2, 5, 3, [](auto x) { return x[0]; });
  REQUIRE_FALSE(lin.degenerate);
  const double h = std::pow(3.0, -5), s = 27;
  const double total = 3 * s * (3 * s - 1) * h * h;
  CHECK(lin.neighbourhood_energy == doctest::Approx(total));
  for (const auto& e : lin.entries) {
    const double inner = s - 2 * s / std::pow(3.0, e.n);
    const double nodes = e.n == 0 ? s * s : s * s - inner * inner;
    CHECK(e.cumulative == doctest::Approx(h * h * nodes / total).epsilon(1e-8));
  }
  CHECK(lin.rate > 0);

  const auto deep = decay_experiment(sc, CellIndex{1, {0, 1}}, 4, 4, 6,
                                     [](auto x) { return std::sin(3 * x[0]) + x[1] * x[1]; });
  CHECK(deep.truncated);
  CHECK(deep.depth == 3);
  for (std::size_t n = 1; n < deep.entries.size(); ++n)
    CHECK(deep.entries[n].cumulative <= deep.entries[n - 1].cumulative);
  CHECK(deep.rate > 0);
  CHECK_THROWS_AS(decay_experiment(sc, CellIndex{1, {1, 1}}, 3, 3, 2, [](auto) { return 0.0; }),
                  ContractViolation);
}

TEST_CASE("fit_decay recovers an exact exponential") {
  std::vector<double> x{1, 2, 3, 4}, y;
  for (double v : x) y.push_back(2.5 * std::exp(-0.7 * v));
  const auto [c, C] = fit_decay(x, y);
  CHECK(c == doctest::Approx(0.7));
  CHECK(C == doctest::Approx(2.5));
}
