#include <cmath>
#include <random>

#include "phg/error.hpp"
#include "phg/indices.hpp"
#include "support.hpp"

using namespace phg;

TEST_CASE("characteristic roots") {
  SUBCASE("λ = 0") {
    auto r = characteristicRoots(0.0);
    CHECK(r.mBar == 1.0);
    CHECK(r.mUnder == -2.0);
    REQUIRE(r.exactBar);
    CHECK(*r.exactBar == Rational(1));
  }
  SUBCASE("λ = 5") {
    auto r = characteristicRoots(5.0);
    CHECK(r.mBar == 3.0);
    CHECK(r.mUnder == -4.0);
    CHECK(*r.exactUnder == Rational(-4));
  }
  SUBCASE("λ = 1 is irrational") {
    auto r = characteristicRoots(1.0);
    CHECK(r.mBar == doctest::Approx((-1 + std::sqrt(17.0)) / 2));
    CHECK_FALSE(r.exactBar);
  }
  SUBCASE("large λ follows √(2λ)") {
    auto r = characteristicRoots(1e6);
    CHECK(std::abs(r.mBar / std::sqrt(2e6) - 1.0) <= 1e-3);
  }
  SUBCASE("negative λ is rejected") { CHECK_THROWS_AS(characteristicRoots(-1.0), InputError); }
}

TEST_CASE("root residual and Vieta on random eigenvalues") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int n = 0; n < 200; ++n) {
    const double l = u(rng);
    const auto r = characteristicRoots(l);
    CHECK(std::abs(indicialShift(r.mBar) - l) <= 1e-12 * (1 + l));
    CHECK(std::abs(indicialShift(r.mUnder) - l) <= 1e-12 * (1 + l));
    CHECK(std::abs(r.mBar + r.mUnder + 1) <= 1e-12);
    CHECK(std::abs(r.mBar * r.mUnder + 2 + 2 * l) <= 1e-12 * (1 + l));
    CHECK(r.mBar >= 1.0);
    CHECK(r.mUnder <= -2.0);
  }
}

TEST_CASE("point model index set") {
  auto I = buildIndexSet(SpectralModel::point(), 3.0);
  CHECK(I.elements() == std::vector<double>{0, 1, 2, 3});
  CHECK(I.isResonant(1.0));
  CHECK_FALSE(I.isResonant(2.0));
  CHECK(I.resonantModesAt(1.0) == std::vector<std::size_t>{0});
}

TEST_CASE("irrational generator") {
  const double m = (-1 + std::sqrt(17.0)) / 2;
  auto I = buildIndexSet({1.0, m}, 3.2, {1.0, m});
  const std::vector<double> expect{0, 1, m, 2, 1 + m, 3, 2 * m};
  REQUIRE(I.size() == expect.size());
  for (std::size_t n = 0; n < expect.size(); ++n) CHECK(I[n] == doctest::Approx(expect[n]).epsilon(1e-12));
  CHECK(I.isResonant(m));
  CHECK(I.nextIndex(1.0) == doctest::Approx(m));
}

TEST_CASE("integer resonance from λ = 5") {
  auto I = buildIndexSet({1.0, 3.0}, 4.0, {1.0, 3.0});
  CHECK(I.elements() == std::vector<double>{0, 1, 2, 3, 4});
  CHECK(I.resonantModesAt(3.0) == std::vector<std::size_t>{1});
}

TEST_CASE("index set agrees with a brute-force enumeration and is closed") {
  const auto model = SpectralModel::circle(7, 0.9);
  const double A = 6.0;
  auto I = buildIndexSet(model, A);
  std::vector<double> gens{1.0};
  for (double l : model.eigenvalues()) {
    const double m = characteristicRoots(l).mBar;
    if (m <= A) gens.push_back(m);
  }
  std::vector<double> brute{0.0};
  for (std::size_t g = 0; g < gens.size(); ++g) {
    std::vector<double> next = brute;
    for (double b : brute)
      for (double s = b + gens[g]; s <= A + 1e-12; s += gens[g]) next.push_back(s);
    brute = next;
  }
  std::sort(brute.begin(), brute.end());
  std::vector<double> merged;
  for (double b : brute)
    if (merged.empty() || b - merged.back() > kIndexTolerance) merged.push_back(b);
  REQUIRE(merged.size() == I.size());
  for (std::size_t n = 0; n < merged.size(); ++n) CHECK(std::abs(merged[n] - I[n]) < 1e-9);
  for (double a : I.elements())
    for (double b : I.elements())
      if (a + b <= A - 1e-9) CHECK(I.contains(a + b));
  for (std::size_t n = 1; n < I.size(); ++n) CHECK(I[n] - I[n - 1] > kIndexTolerance);
}

TEST_CASE("nextIndex") {
  auto I = buildIndexSet(SpectralModel::point(), 3.0);
  CHECK(I.nextIndex(1.0) == 2.0);
  CHECK(I.hasNext(2.0));
  CHECK_FALSE(I.hasNext(3.0));
  CHECK_THROWS(I.nextIndex(3.0));
}

TEST_CASE("epsilon ledger is positive") {
  const auto model = SpectralModel::circle(5);
  auto I = buildIndexSet(model, 5.0);
  auto eps = I.epsilonLedger();
  REQUIRE(eps.size() == I.size() - 1);
  for (const auto& e : eps) {
    CHECK(e.epsilon > 0.0);
    CHECK(e.epsilon <= (e.next - e.index) / 2 + 1e-15);
  }
  // Pair (1, m̄₁); the next resonant root past m̄₁ comes from λ = 4.
  const double m1 = characteristicRoots(1.0).mBar, m4 = characteristicRoots(4.0).mBar;
  CHECK(eps[1].epsilon == doctest::Approx(std::min(m1 - 1.0, m4 - m1) / 2));
}

TEST_CASE("enumerateMonoid and degenerate generators") {
  CHECK(enumerateMonoid({1.5}, 4.0) == std::vector<double>{0, 1.5, 3.0});
  CHECK_THROWS_AS(buildIndexSet({1.0, 1.0 + 1e-11}, 3.0), InputError);
}
