#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gsc/errors.hpp"
#include "gsc/resistance.hpp"

using namespace gsc;

TEST_CASE("full cube resistance is 1") {
  const auto full = GscPattern::full_cube(2, 3);
  for (int n = 1; n <= 3; ++n)
    for (int mp = n; mp <= n + 2; ++mp)
      CHECK(std::abs(raw_resistance(full, n, mp).D - 1.0) < 1e-8);
  CHECK(std::abs(raw_resistance(GscPattern::full_cube(3, 3), 1, 2).D - 1.0) < 1e-8);
  ResistanceOptions half;
  half.half_factor = true;
  CHECK(raw_resistance(full, 1, 2, half).D == doctest::Approx(0.5));
}

TEST_CASE("axis symmetry and Rayleigh monotonicity") {
  const auto sc = GscPattern::standard_carpet();
  for (auto [n, mp] : {std::pair{1, 3}, {2, 3}, {2, 4}}) {
    const double d0 = raw_resistance(sc, n, mp, {}, 0).D;
    const double d1 = raw_resistance(sc, n, mp, {}, 1).D;
    CHECK(std::abs(d0 - d1) <= 1e-8 * d0);
    CHECK(1.0 / d0 >= 1.0 / raw_resistance(GscPattern::full_cube(2, 3), n, mp).D);
  }
  const auto menger = GscPattern::menger_sponge();
  const double a = raw_resistance(menger, 1, 2, {}, 0).D;
  for (int axis : {1, 2}) CHECK(std::abs(raw_resistance(menger, 1, 2, {}, axis).D - a) <= 1e-8 * a);
}

TEST_CASE("resistance series") {
  const auto full = resistance_series(GscPattern::full_cube(2, 3), 3, 1);
  CHECK(full.complete);
  CHECK(full.rho_hat == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(full.rhobar_hat == doctest::Approx(1.0).epsilon(1e-8));
  for (const auto& e : full.entries) CHECK(e.R_hat == doctest::Approx(1.0).epsilon(1e-8));

  const auto sc = resistance_series(GscPattern::standard_carpet(), 3, 1);
  CHECK(sc.entries.size() == 3);
  CHECK(sc.rho_hat >= 1.125 - 0.05);
  CHECK(sc.rho_hat <= 1.5 + 0.05);
  CHECK(sc.rhobar_hat >= 1.0 - 0.05);
  CHECK((sc.ds_hat < 2) == (sc.rho_hat > 1));
  CHECK(sc.entries[2].ratio == doctest::Approx(sc.entries[1].D / sc.entries[2].D));
  CHECK_THROWS_AS(resistance_series(GscPattern::standard_carpet(), 1, 1), ContractViolation);

  // A failing level leaves a flagged partial series.
  ResistanceOptions tiny;
  tiny.solve.max_iter = 2;
  const auto partial = resistance_series(GscPattern::standard_carpet(), 3, 2, tiny);
  CHECK_FALSE(partial.complete);
  CHECK_FALSE(partial.error.empty());
}

TEST_CASE("phi branches") {
  const auto sc = GscPattern::standard_carpet();
  const double rho = 1.25;
  CHECK(phi(sc, 0, 1.0, rho) == doctest::Approx(1.0));
  CHECK(phi(sc, 3, 1.0, rho) == doctest::Approx(1.0));
  const double df = dims(sc).d_f, dw = walk_dimension(sc, rho);
  CHECK(phi(sc, 2, 1.0 / 3, rho) == doctest::Approx(std::pow(1.0 / 3, df - dw)));
  // d = 2: constant below the switch, continuous at it.
  const double edge = std::pow(3.0, -2);
  CHECK(phi(sc, 2, edge * 0.5, rho) == doctest::Approx(phi(sc, 2, edge * 0.01, rho)));
  CHECK(phi(sc, 2, edge * (1 - 1e-12), rho) == doctest::Approx(phi(sc, 2, edge, rho)));
  CHECK_THROWS_AS(phi(sc, 2, 0.0, rho), ContractViolation);
  // Non-increasing on (0,1] when dw > df.
  double prev = phi(sc, 2, 1e-4, rho);
  for (double r = 2e-4; r <= 1.0; r *= 1.3) {
    const double v = phi(sc, 2, r, rho);
    CHECK(v <= prev * (1 + 1e-12));
    prev = v;
  }
}

TEST_CASE("Harnack ratio") {
  const auto full = build_lattice(GscPattern::full_cube(2, 3), 0, 4);
  const std::vector<double> mid{0.5, 0.5};
  CHECK(*harnack_ratio(full, mid, 0.3, [](auto) { return 3.0; }) == doctest::Approx(1.0));
  const auto ratio = harnack_ratio(full, mid, 0.3, [](auto x) { return x[0] < 0.25 ? 1.0 : 2.0; });
  REQUIRE(ratio);
  CHECK(*ratio > 1.0);
  CHECK(*ratio < 2.0);
  CHECK_FALSE(harnack_ratio(full, mid, 0.3, [](auto x) { return x[0] - 0.5; }));

  // Standard carpet, fixed geometric ball, across m.
  const auto sc = GscPattern::standard_carpet();
  const std::vector<double> c{1.0 / 6, 0.5};
  std::vector<double> ratios;
  for (int m = 2; m <= 4; ++m) {
    const auto dom = build_lattice(sc, m, m + 1);
    const auto r = harnack_ratio(dom, c, 0.15, [](auto x) { return 1.0 + x[0] + 2 * x[1] * x[1]; });
    REQUIRE(r);
    ratios.push_back(*r);
  }
  for (double r : ratios) {
    CHECK(r >= 1.0);
    CHECK(r < 3.0);
  }
}

TEST_CASE("Poincare ratio") {
  const auto full = build_lattice(GscPattern::full_cube(2, 3), 0, 5);
  std::vector<double> x1(full.size()), one(full.size(), 1.0);
  for (std::size_t i = 0; i < full.size(); ++i) x1[i] = full.center(i)[0];
  const std::vector<double> mid{0.5, 0.5};
  CHECK(poincare_ratio(full, one, mid, 0.3, 0.5, 1.0) == 0.0);
  // Disc integrals: mean-square deviation (c r)^2 / 4, energy pi r^2.
  const double c = 0.5;
  CHECK(poincare_ratio(full, x1, mid, 0.3, c, 1.0) ==
        doctest::Approx(c * c / (4 * std::numbers::pi)).epsilon(0.03));
  CHECK_THROWS_AS(poincare_ratio(full, x1, mid, 0.3, 1.5, 1.0), ContractViolation);

  const auto sc = build_lattice(GscPattern::standard_carpet(), 2, 4);
  const auto sol = solve_dirichlet(sc, resistance_constraints(sc, 0, BoundaryMode::Face));
  double sup = 0;
  for (double px : {0.2, 0.5, 0.8})
    for (double r : {0.1, 0.2, 0.4}) {
      const std::vector<double> p{px, 0.15};
      sup = std::max(sup, poincare_ratio(sc, sol.values, p, r, 0.5, 1.25));
    }
  CHECK(std::isfinite(sup));
  CHECK(sup > 0);
}
