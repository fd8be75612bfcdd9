#include <cmath>

#include "phg/error.hpp"
#include "phg/fit.hpp"
#include "support.hpp"

using namespace phg;

TEST_CASE("synthetic 2x + 3x²") {
  auto g = makeGrid(0.1, 1e-6, 256);
  std::vector<double> y, rem;
  for (double x : g.points) {
    y.push_back(2 * x + 3 * x * x);
    rem.push_back(y.back() - 2 * x);
  }
  auto s = fitLogLogSlope(g.points, rem, 2);
  CHECK(std::abs(s.slope - 2.0) <= 0.02);
  CHECK(s.logPower == 0);
  auto f = fitMonomials(g.points, y, {{1, 0}, {2, 0}}, 1.0);
  CHECK(std::abs(f.coefficients[0] - 2.0) <= 1e-8);
  CHECK(std::abs(f.coefficients[1] - 3.0) <= 0.01);
}

TEST_CASE("x log x is recognized as log power 1") {
  auto g = makeGrid(0.1, 1e-6, 256);
  std::vector<double> y;
  for (double x : g.points) y.push_back(x * std::log(x));
  auto s = fitLogLogSlope(g.points, y, 2);
  CHECK(s.logPower == 1);
  CHECK(s.slope == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fitWindow rejects short windows") {
  auto g = makeGrid(0.1, 1e-6, 64);
  CHECK(fitWindow(g, 1e-5, 1e-2).size() >= 16);
  CHECK_THROWS_AS(fitWindow(g, 1e-3, 1.2e-3), InputError);
}

TEST_CASE("fitMonomials shape errors") {
  std::vector<double> x{1, 2}, y{1};
  CHECK_THROWS_AS(fitMonomials(x, y, {{1, 0}}, 0), InputError);
  CHECK_THROWS_AS(fitMonomials(x, x, {}, 0), InputError);
}

TEST_CASE("fitOrderFor stays inside the index set") {
  auto I = buildIndexSet(SpectralModel::point(), 5.0);
  CHECK(fitOrderFor(I, 2.0, 2.0) == 4.0);
  CHECK(fitOrderFor(I, 2.0, 10.0) == 4.0);
}

TEST_CASE("remainder fit on the point model") {
  auto m = phgtest::pointModel();
  auto p = phgtest::problemWith(m, 5, 0.5, {{1, SpectralFunction{0.03}}, {2, SpectralFunction{0.3}}});
  auto g = makeGrid(0.1, 1e-6, 512);
  auto f = formalExpansion(p, 4.0);
  PicardOptions o;
  o.tol = 1e-13;
  auto sol = picardSolve(p, g, boundaryDataFrom(f.psi, g.x0), o);
  auto r = fitRemainder(sol.modes, g, p, 2.0);
  REQUIRE(r.remainderSlopes.size() >= 2);
  for (const auto& s : r.remainderSlopes) {
    if (s.k == 1.0 || s.k == 2.0) {
      CHECK(s.pass);
      CHECK(std::abs(s.slope - s.expected) <= 0.1);
    }
  }
  for (const auto& d : r.discrepancies)
    if (!d.free) CHECK(d.relative < 0.02);
  // The boundary datum came from a formal sum with c₁,₀ = 0, so the fitted free
  // component is whatever the global solution needs; it must be finite.
  REQUIRE(r.fittedFreeComponents.size() == 1);
  CHECK(std::isfinite(r.fittedFreeComponents[0].value));
}
