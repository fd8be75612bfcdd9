#include <cmath>
#include <numbers>

#include "phg/error.hpp"
#include "phg/modeode.hpp"
#include "support.hpp"

using namespace phg;

namespace {

double maxDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t n = 0; n < a.size(); ++n) d = std::max(d, std::abs(a[n] - b[n]));
  return d;
}

}  // namespace

TEST_CASE("geometric grid") {
  auto g = makeGrid(0.1, 1e-6, 64);
  REQUIRE(g.points.size() == 64);
  CHECK(g.points.front() == doctest::Approx(1e-6));
  CHECK(g.points.back() == 0.1);
  CHECK(g.points[1] / g.points[0] == doctest::Approx(g.points[63] / g.points[62]));
  CHECK_THROWS_AS(makeGrid(0.1, 0.2, 64), InputError);
  CHECK_THROWS_AS(makeGrid(0.1, 1e-6, 1), InputError);
}

TEST_CASE("Gauss-Legendre rule integrates degree 2n − 1 exactly") {
  std::vector<double> t, w;
  gaussLegendre(8, t, w);
  for (int deg = 0; deg <= 15; ++deg) {
    double s = 0;
    for (std::size_t k = 0; k < t.size(); ++k) s += w[k] * std::pow(t[k], deg);
    const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
    CHECK(std::abs(s - exact) < 1e-14);
  }
}

TEST_CASE("panel integration matrix reproduces antiderivatives") {
  auto g = makeGrid(0.1, 1e-3, 16);
  PanelQuadrature q(g);
  const auto& tau = q.referenceNodes();
  // ∫_{-1}^{τ_a} τ^7 dτ = (τ_a^8 − 1)/8.
  for (std::size_t a = 0; a < tau.size(); ++a) {
    double s = 0;
    for (std::size_t c = 0; c < tau.size(); ++c) s += q.integrationMatrix(a, c) * std::pow(tau[c], 7);
    CHECK(std::abs(s - (std::pow(tau[a], 8) - 1) / 8) < 1e-14);
  }
  CHECK(q.paddingPanels() > 0);
  CHECK(q.nodeCount() == q.panelCount() * q.nodesPerPanel());
}

TEST_CASE("homogeneous solution is the bounded branch") {
  auto g = makeGrid(0.1, 1e-6, 256);
  for (double lambda : {0.0, 1.0, 5.0}) {
    auto s = solveModeODE(lambda, [](double) { return 0.0; }, 1.0, g);
    const double m = characteristicRoots(lambda).mBar;
    for (std::size_t n = 0; n < g.points.size(); n += 17)
      CHECK(s.values[n] == doctest::Approx(std::pow(g.points[n] / 0.1, m)).epsilon(1e-10));
    CHECK(s.values.back() == doctest::Approx(1.0));
  }
}

TEST_CASE("polynomial forcing matches the closed form") {
  // −λv + Nv = x², λ = 0: v = x²/2 + (d − x₀²/2)(x/x₀).
  auto g = makeGrid(0.1, 1e-6, 256);
  const double d = 0.3;
  auto s = solveModeODE(0.0, [](double x) { return x * x; }, d, g);
  for (std::size_t n = 0; n < g.points.size(); n += 11) {
    const double x = g.points[n];
    const double want = x * x / 2 + (d - 0.005) * (x / 0.1);
    CHECK(std::abs(s.values[n] - want) < 1e-12);
  }
}

TEST_CASE("resonant forcing produces x log x") {
  // Nv = x: v = (2/3) x log x + c x.
  auto g = makeGrid(0.1, 1e-6, 256);
  auto s = solveModeODE(0.0, [](double x) { return x; }, 0.0, g);
  const double c = -(2.0 / 3.0) * std::log(0.1);
  for (std::size_t n = 0; n < g.points.size(); n += 13) {
    const double x = g.points[n];
    CHECK(std::abs(s.values[n] - ((2.0 / 3.0) * x * std::log(x) + c * x)) < 1e-12);
  }
}

TEST_CASE("mode solver is linear") {
  auto g = makeGrid(0.1, 1e-6, 128);
  auto f1 = [](double x) { return std::sqrt(x) * std::log(x); };
  auto f2 = [](double x) { return x * x * x; };
  auto a = solveModeODE(2.0, f1, 0.4, g), b = solveModeODE(2.0, f2, -0.1, g);
  auto ab = solveModeODE(2.0, [&](double x) { return 2 * f1(x) - 3 * f2(x); }, 2 * 0.4 + 0.3, g);
  double worst = 0;
  for (std::size_t n = 0; n < g.points.size(); ++n)
    worst = std::max(worst, std::abs(ab.values[n] - (2 * a.values[n] - 3 * b.values[n])));
  CHECK(worst < 1e-12);
}

TEST_CASE("averageTheta recovers Fourier modes and flags aliasing") {
  auto g = makeGrid(0.1, 1e-3, 8);
  auto u = [](double theta, double x, std::size_t mode) { return x * std::cos(theta * double(mode)); };
  auto fine = averageTheta(u, g, 3, 16);
  CHECK_FALSE(fine.aliasDetected);
  CHECK(fine.modes[0][3] == doctest::Approx(g.points[3]));
  CHECK(std::abs(fine.modes[1][3]) < 1e-15);
  // cos 4θ sampled at 4 points averages to 1 but the true mean is 0.
  auto bad = averageTheta([](double t, double, std::size_t) { return std::cos(4 * t); }, g, 1, 4);
  CHECK(bad.aliasDetected);
}

TEST_CASE("Picard iteration") {
  auto m = phgtest::pointModel();
  auto g = makeGrid(0.1, 1e-6, 256);
  SUBCASE("trivial problem converges to zero immediately") {
    auto p = phgtest::problemWith(m, 4, 0.5, {});
    const double zero[] = {0.0};
    auto r = picardSolve(p, g, zero);
    CHECK(r.iterations <= 2);
    CHECK(maxDiff(r.modes[0].values, std::vector<double>(g.points.size(), 0.0)) == 0.0);
  }
  SUBCASE("nonlinear problem converges within 50 iterations") {
    auto p = phgtest::problemWith(m, 4, 0.5, {{1, SpectralFunction{0.09}}, {2, SpectralFunction{0.2}}});
    const double datum[] = {0.01};
    PicardOptions o;
    o.tol = 1e-13;
    auto r = picardSolve(p, g, datum, o);
    CHECK(r.iterations <= 50);
    CHECK(r.finalChange <= 1e-13);
  }
  SUBCASE("too few iterations is a numerical failure") {
    auto p = phgtest::problemWith(m, 4, 0.5, {{1, SpectralFunction{0.09}}});
    const double datum[] = {0.01};
    PicardOptions o;
    o.tol = 1e-14;
    o.maxIter = 2;
    CHECK_THROWS_AS(picardSolve(p, g, datum, o), NumericalError);
  }
  SUBCASE("wrong number of boundary data") {
    auto p = phgtest::problemWith(m, 4, 0.5, {});
    const double two[] = {0.0, 0.0};
    CHECK_THROWS_AS(picardSolve(p, g, two), InputError);
  }
}

TEST_CASE("solution is stable under grid doubling") {
  auto m = phgtest::shared(SpectralModel::circle(3));
  SpectralFunction f1 = m->constant(0.05);
  f1[1] = 0.04;
  auto p = phgtest::problemWith(m, 4, 0.5, {{1, f1}});
  const std::vector<double> datum{0.01, 0.002, 0.0};
  auto coarse = picardSolve(p, makeGrid(0.1, 1e-6, 257), datum);
  auto fine = picardSolve(p, makeGrid(0.1, 1e-6, 513), datum);
  double worst = 0;
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t n = 0; n < 257; ++n)
      worst = std::max(worst, std::abs(coarse.modes[l].values[n] - fine.modes[l].values[2 * n]));
  CHECK(worst < 1e-6);
}
