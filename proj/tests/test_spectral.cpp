#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "phg/error.hpp"
#include "phg/spectral.hpp"
#include "support.hpp"

using namespace phg;
using std::numbers::pi;

namespace {

SpectralFunction randomFunction(std::size_t L, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpectralFunction f(L);
  for (std::size_t l = 0; l < L; ++l) f[l] = u(rng);
  return f;
}

double evaluate(const SpectralModel& m, const SpectralFunction& f, std::span<const double> p) {
  double s = 0;
  for (std::size_t l = 0; l < m.size(); ++l) s += f[l] * m.evaluateBasis(l, p);
  return s;
}

}  // namespace

TEST_CASE("point model") {
  const auto m = SpectralModel::point();
  CHECK(m.size() == 1);
  CHECK(m.eigenvalue(0) == 0.0);
  CHECK(m.volume() == 1.0);
  CHECK(m.multiply(SpectralFunction{2.0}, SpectralFunction{3.0})[0] == doctest::Approx(6.0));
  CHECK(m.mean(m.constant(4.0)) == doctest::Approx(4.0));
}

TEST_CASE("circle model eigenvalues and volume") {
  const auto m = SpectralModel::circle(5, 2.0);
  CHECK(m.volume() == doctest::Approx(4 * pi));
  const std::vector<double> expect{0, 0.25, 0.25, 1.0, 1.0};
  for (std::size_t l = 0; l < 5; ++l) CHECK(m.eigenvalue(l) == doctest::Approx(expect[l]));
  CHECK(m.constant(1.0)[0] == doctest::Approx(std::sqrt(4 * pi)));
}

TEST_CASE("torus eigenvalue count matches a lattice brute force") {
  for (int n : {2, 3}) {
    for (int cut : {1, 2, 5}) {
      const auto m = SpectralModel::torus(n, cut);
      const int d = 2 * n - 2;
      std::size_t count = 0;
      std::vector<int> xi(d, -cut);
      while (true) {
        int sq = 0;
        for (int v : xi) sq += v * v;
        count += sq <= cut;
        int a = 0;
        while (a < d && xi[a] == cut) xi[a++] = -cut;
        if (a == d) break;
        ++xi[a];
      }
      CHECK(m.size() == count);
      CHECK(m.dimD() == d);
      CHECK(m.volume() == doctest::Approx(std::pow(2 * pi, d)));
    }
  }
}

TEST_CASE("built-in bases are orthonormal") {
  for (const auto& m : {SpectralModel::circle(7), SpectralModel::torus(2, 2)}) {
    for (std::size_t l = 0; l < m.size(); ++l) {
      auto proj = m.projectSamples([&](std::span<const double> p) { return m.evaluateBasis(l, p); }, 32);
      CHECK((proj - SpectralFunction::unit(m.size(), l)).maxAbs() < 1e-12);
    }
  }
}

TEST_CASE("spectral product is commutative and associative on the retained modes") {
  std::mt19937_64 rng(3);
  const auto m = SpectralModel::torus(2, 2);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = randomFunction(m.size(), rng), b = randomFunction(m.size(), rng);
    CHECK((m.multiply(a, b) - m.multiply(b, a)).maxAbs() < 1e-13);
  }
  // Associativity is exact for products that stay inside the truncation.
  const auto c = SpectralModel::circle(9);
  SpectralFunction a(9), b(9), d(9);
  a[1] = 0.7;
  b[2] = -0.4;
  d[0] = 0.3;
  d[1] = 0.2;
  CHECK((c.multiply(c.multiply(a, b), d) - c.multiply(a, c.multiply(b, d))).maxAbs() < 1e-13);
}

TEST_CASE("circle product reproduces product-to-sum identities pointwise") {
  const auto m = SpectralModel::circle(9);
  std::mt19937_64 rng(5);
  // Band-limited to |k| ≤ 2 so the product stays within |k| ≤ 4.
  SpectralFunction a(9), b(9);
  for (std::size_t l = 0; l < 5; ++l) {
    a[l] = std::uniform_real_distribution<double>(-1, 1)(rng);
    b[l] = std::uniform_real_distribution<double>(-1, 1)(rng);
  }
  const auto ab = m.multiply(a, b);
  for (double theta : {0.0, 0.4, 1.3, 2.9, 5.5}) {
    const double p[] = {theta};
    CHECK(evaluate(m, ab, p) == doctest::Approx(evaluate(m, a, p) * evaluate(m, b, p)).epsilon(1e-12));
  }
}

TEST_CASE("constant function acts as a scalar") {
  const auto m = SpectralModel::torus(2, 2);
  std::mt19937_64 rng(9);
  auto f = randomFunction(m.size(), rng);
  CHECK((m.multiply(m.constant(2.0), f) - 2.0 * f).maxAbs() < 1e-13);
}

TEST_CASE("projection onto an eigenspace") {
  const auto m = SpectralModel::circle(5);
  SpectralFunction d{1, 2, 3, 4, 5};
  auto [d0, dp] = m.projectOntoEigenspace(d, 1.0);
  CHECK(d0 == SpectralFunction{0, 2, 3, 0, 0});
  CHECK(dp == SpectralFunction{1, 0, 0, 4, 5});
  CHECK(m.eigenspace(4.0).kernelIndices == std::vector<std::size_t>{3, 4});
  CHECK(m.eigenspace(2.0).kernelIndices.empty());
}

TEST_CASE("solveShiftedPoisson solves (Δ + μ)c = d") {
  const auto m = SpectralModel::circle(7);
  std::mt19937_64 rng(13);
  SUBCASE("non-resonant shift") {
    auto d = randomFunction(7, rng);
    const double mu = 0.5;
    auto c = m.solveShiftedPoisson(d, mu);
    CHECK((m.applyLaplacian(c) + mu * c - d).maxAbs() < 1e-13);
    // Mode l: (μ − λ_l)c_l = d_l.
    CHECK(c[1] == doctest::Approx(d[1] / (mu - 1.0)));
  }
  SUBCASE("resonant shift with kernel-free data leaves the kernel at zero") {
    SpectralFunction d{1, 0, 0, 2, 0, 0, 0};
    auto c = m.solveShiftedPoisson(d, 1.0);
    CHECK(c[1] == 0.0);
    CHECK(c[2] == 0.0);
    CHECK(c[3] == doctest::Approx(2.0 / (1.0 - 4.0)));
  }
  SUBCASE("kernel data raises SolvabilityViolation") {
    CHECK_THROWS_AS(m.solveShiftedPoisson(SpectralFunction::unit(7, 2), 1.0), SolvabilityViolation);
  }
}

TEST_CASE("Weyl growth on the 2-torus") {
  const int L = 120;
  const auto m = SpectralModel::torus(2, L);
  auto count = [&](double lambda) {
    std::size_t n = 0;
    for (double e : m.eigenvalues()) n += e <= lambda + 1e-9;
    return double(n);
  };
  const double a = L / 4.0, b = L;
  const double exponent = std::log(count(b) / count(a)) / std::log(b / a);
  CHECK(std::abs(exponent - 1.0) <= 0.15);
}

TEST_CASE("smooth functions have rapidly decaying coefficients") {
  const auto m = SpectralModel::circle(33);
  auto w = m.projectSamples([](std::span<const double> p) { return std::exp(std::cos(p[0])); }, 128);
  // The k-th Fourier coefficient of exp(cos θ) is 2·I_k(1)·√π ~ 1/(2^k k!).
  CHECK(std::abs(w[1]) > 1e-1);
  CHECK(std::abs(w[19]) == doctest::Approx(2 * std::sqrt(pi) * 2.7529480398368734e-10).epsilon(1e-6));  // k = 10
  CHECK(std::abs(w[31]) < 1e-15);
}

TEST_CASE("dense models are validated") {
  const double t[] = {1.0};
  CHECK(SpectralModel::dense(0, {0.0}, 1.0, t).size() == 1);
  CHECK_THROWS_AS(SpectralModel::dense(0, {1.0}, 1.0, t), InputError);
  const double wrong[] = {1.0, 0.0};
  CHECK_THROWS_AS(SpectralModel::dense(0, {0.0}, 1.0, wrong), InputError);
  CHECK_THROWS_AS(SpectralModel::circle(0), InputError);
}
