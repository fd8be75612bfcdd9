#include <cmath>

#include "phg/error.hpp"
#include "phg/formal.hpp"
#include "support.hpp"

using namespace phg;
using phgtest::pointModel;
using phgtest::problemWith;

namespace {

PhgSeries zeroLike(const ModelProblem& p, double A) { return PhgSeries(p.model, A, p.indexSet); }

// Leading residual position must exceed `order`.
bool residualBeyond(const PhgSeries& r, double order, double tol) {
  for (const auto& t : r.terms())
    if (t.monomial.exponent <= order + kIndexTolerance && t.coeff.maxAbs() > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("residual examples") {
  auto m = pointModel();
  SUBCASE("exact cusp model") {
    auto p = problemWith(m, 4, 0.5, {});
    CHECK(residual(p, zeroLike(p, 4)).empty());
  }
  SUBCASE("linear read-off") {
    auto p = problemWith(m, 4, 0.5, {{1, SpectralFunction{0.2}}});
    auto r = residual(p, zeroLike(p, 4));
    REQUIRE(r.size() == 1);
    CHECK(r.coefficient(1, 0)[0] == doctest::Approx(-0.2));
  }
  SUBCASE("x is invisible to the linearization at i = 1") {
    auto p = problemWith(m, 4, 0.5, {{1, SpectralFunction{0.2}}});
    auto psi = PhgSeries::monomial(m, {1, 0}, SpectralFunction{0.7}, 4, p.indexSet);
    // Lψ = Ñ(cx) = c x, so G(Lψ) − ψ = O(x²) and the x coefficient stays −a.
    CHECK(residual(p, psi).coefficient(1, 0)[0] == doctest::Approx(-0.2));
  }
  SUBCASE("ψ with a constant term is rejected") {
    auto p = problemWith(m, 4, 0.5, {});
    CHECK_THROWS_AS(residual(p, PhgSeries::constant(m, 1.0, 4, p.indexSet)), InputError);
  }
}

TEST_CASE("resonant step at i = 1 produces c₁,₁ = (2/3)a") {
  auto m = pointModel();
  const double a = 0.09;
  auto p = problemWith(m, 4, 0.5, {{1, SpectralFunction{a}}});
  StepRecord rec;
  auto psi = stepCorrection(p, zeroLike(p, 4), {}, &rec);
  CHECK(rec.resonant);
  CHECK(rec.logRaised);
  CHECK(psi.coefficient(1, 1)[0] == doctest::Approx(2.0 / 3.0 * a).epsilon(1e-12));
  CHECK(psi.coefficient(1, 0)[0] == 0.0);
  CHECK(rec.targetAfter <= 1e-11 * a);
  CHECK(firstLogCoefficient(p) == doctest::Approx(0.06));
}

TEST_CASE("non-resonant step agrees with substitution") {
  auto m = phgtest::shared(SpectralModel::circle(5));
  SpectralFunction d(5);
  d[3] = 0.3;  // cos 2θ, λ = 4; μ(1) = 0 is not an eigenvalue of that mode
  auto p = problemWith(m, 3, 0.5, {{1, d}});
  StepRecord rec;
  auto psi = stepCorrection(p, zeroLike(p, 3), {}, &rec);
  CHECK_FALSE(rec.logRaised);
  // (Δ + N)(c x) = −(residual) = d x, and residual = −d x, so c = d/(μ − λ).
  CHECK(psi.coefficient(1, 0)[3] == doctest::Approx(0.3 / (0.0 - 4.0)));
  auto lin = add(applyLaplacian(psi), applyN(psi));
  CHECK(lin.coefficient(1, 0)[3] == doctest::Approx(0.3));
}

TEST_CASE("step with zero residual returns ψ unchanged") {
  auto p = problemWith(pointModel(), 3, 0.5, {});
  auto psi = zeroLike(p, 3);
  CHECK(stepCorrection(p, psi).empty());
}

TEST_CASE("formalExpansion examples") {
  auto m = pointModel();
  SUBCASE("f ≡ −c₀ gives ψ = 0 at every order") {
    auto p = problemWith(m, 5, 0.5, {});
    for (double k : {1.0, 2.0, 3.0}) CHECK(formalExpansion(p, k).psi.empty());
  }
  SUBCASE("order 1 on the point model") {
    auto p = problemWith(m, 4, 0.5, {{1, SpectralFunction{0.09}}});
    auto f = formalExpansion(p, 1.0);
    CHECK(f.psi.coefficient(1, 1)[0] == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(f.psi.coefficient(1, 0)[0] == 0.0);
    REQUIRE(f.freeComponents.size() == 1);
    CHECK(f.freeComponents[0].exponent == 1.0);
    CHECK(residualBeyond(f.finalResidual, 1.0, 1e-12));
  }
  SUBCASE("mean-free circle forcing has no log at order 1") {
    auto mc = phgtest::shared(SpectralModel::circle(5));
    SpectralFunction d(5);
    d[1] = 0.05;
    auto p = problemWith(mc, 4, 0.5, {{1, d}});
    auto f = formalExpansion(p, 1.0);
    CHECK(f.psi.maxLogPower(1.0) == 0);
    CHECK(firstLogCoefficient(p) == 0.0);
    // cos θ at i = 1: μ = 0, λ = 1, c = d/(0 − 1).
    CHECK(f.psi.coefficient(1, 0)[1] == doctest::Approx(-0.05));
  }
}

TEST_CASE("residual descends strictly and logs appear only at resonance") {
  auto m = phgtest::shared(SpectralModel::circle(5));
  SpectralFunction f1 = m->constant(0.05);
  f1[1] = 0.04;
  SpectralFunction f2(5);
  f2[3] = 0.1;
  auto p = problemWith(m, 5, 0.5, {{1, f1}, {2, f2}});
  auto f = formalExpansion(p, 3.0);
  for (std::size_t s = 0; s < f.steps.size(); ++s) {
    const auto& st = f.steps[s];
    if (st.nextLeading) CHECK(precedes(st.target, *st.nextLeading));
    CHECK(st.targetAfter <= 1e-11 * std::max(1.0, st.targetBefore));
  }
  for (const auto& r : f.logLedger)
    if (r.producedLogPower > std::max(r.forcingLogPower, 0)) CHECK(r.resonant);
  CHECK(residualBeyond(f.finalResidual, 3.0, 1e-11));
  CHECK(f.psi.coefficient(1, 1)[0] == doctest::Approx(firstLogCoefficient(p) * std::sqrt(m->volume())));
}

TEST_CASE("order-1 coefficients scale linearly with the data") {
  auto m = pointModel();
  auto base = formalExpansion(problemWith(m, 4, 0.5, {{1, SpectralFunction{0.05}}, {2, SpectralFunction{0.1}}}), 2.0);
  for (double s : {0.5, 2.0, -3.0}) {
    auto scaled = formalExpansion(
        problemWith(m, 4, 0.5, {{1, SpectralFunction{0.05 * s}}, {2, SpectralFunction{0.1 * s}}}), 2.0);
    CHECK(scaled.psi.coefficient(1, 1)[0] == doctest::Approx(s * base.psi.coefficient(1, 1)[0]).epsilon(1e-12));
  }
}

TEST_CASE("gauge freedom keeps the residual order") {
  auto m = pointModel();
  auto p = problemWith(m, 4, 0.5, {{1, SpectralFunction{0.05}}});
  auto f = formalExpansion(p, 1.0);
  auto shifted = add(f.psi, PhgSeries::monomial(m, {1, 0}, SpectralFunction{1e-3}, f.psi.truncation(), p.indexSet));
  CHECK(residualBeyond(residual(p, shifted), 1.0, 1e-12));
  FormalOptions o;
  o.prescribed = {{1.0, 0, 1e-3}};
  auto g = formalExpansion(p, 2.0, o);
  CHECK(g.psi.coefficient(1, 0)[0] == doctest::Approx(1e-3));
  CHECK(residualBeyond(g.finalResidual, 2.0, 1e-11));
}

TEST_CASE("problem validation") {
  auto m = phgtest::shared(SpectralModel::circle(3));
  auto I = phgtest::indexSetFor(m, 3);
  SUBCASE("non-constant exponent-0 term") {
    auto f = PhgSeries::monomial(m, {0, 0}, SpectralFunction{1, 1, 0}, 3, I);
    CHECK_THROWS_AS(makeProblem(m, I, f), InputError);
  }
  SUBCASE("log factors in the source") {
    auto f = PhgSeries::monomial(m, {1, 1}, SpectralFunction{1, 0, 0}, 3, I);
    CHECK_THROWS_AS(makeProblem(m, I, f), InputError);
  }
  SUBCASE("c₀ is read off the constant term") {
    auto p = makeProblem(m, I, PhgSeries::constant(m, -0.25, 3, I));
    CHECK(p.c0 == doctest::Approx(0.25));
  }
  SUBCASE("perturbation must be O(x)") {
    auto f = PhgSeries::constant(m, -0.25, 3, I);
    CHECK_THROWS_AS(makeProblem(m, I, f, AnalyticGerm::log1p(), PhgSeries::constant(m, 0.1, 3, I)), InputError);
  }
}

TEST_CASE("tiny prescribed free components do not stall the recursion") {
  auto m = phgtest::shared(SpectralModel::circle(3));
  SpectralFunction f1 = m->constant(0.05);
  f1[1] = 0.04;
  auto p = problemWith(m, 5, 0.5, {{1, f1}});
  const double mBar = characteristicRoots(1.0).mBar;
  FormalOptions o;
  o.prescribed = {{1.0, 0, 9.6e-10}, {mBar, 1, 1.9e-9}};
  auto f = formalExpansion(p, 4.0, o);
  CHECK(f.psi.coefficient(1, 0)[0] == doctest::Approx(9.6e-10));
  CHECK(f.psi.coefficient(mBar, 0)[1] == doctest::Approx(1.9e-9));
  CHECK(residualBeyond(f.finalResidual, 4.0, 1e-11));
}
