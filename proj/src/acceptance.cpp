#include "phg/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "phg/error.hpp"
#include "phg/harness.hpp"

namespace phg {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::shared_ptr<const SpectralModel> pointModel() {
  return std::make_shared<const SpectralModel>(SpectralModel::point());
}

ModelProblem pointProblem(double a, double b, double cutoff) {
  auto m = pointModel();
  auto I = std::make_shared<const IndexSet>(buildIndexSet(*m, cutoff));
  PhgSeries f = PhgSeries(m).withTerm({0, 0}, m->constant(-0.5)).withTerm({1, 0}, m->constant(a));
  if (b != 0.0) f = f.withTerm({2, 0}, m->constant(b));
  return makeProblem(m, I, f);
}

// Oracle value of a coefficient in a pipeline report.
std::optional<double> oracleValue(const ExpansionReport& r, LogMonomial m, std::size_t mode) {
  for (const auto& c : r.discrepancies) {
    if (c.mode == mode && sameMonomial({c.exponent, c.logPower}, m)) return c.oracle;
  }
  return std::nullopt;
}

const RemainderSlope* slopeAt(const ExpansionReport& r, double k) {
  for (const auto& s : r.remainderSlopes) {
    if (std::abs(s.k - k) <= kIndexTolerance) return &s;
  }
  return nullptr;
}

// ½ v_tt + ½ v_t − v in t = log x.
double indicialByDifferences(const std::function<double(double)>& f, double x, double h) {
  const double t = std::log(x);
  auto g = [&](double s) { return f(std::exp(s)); };
  const double gm2 = g(t - 2 * h), gm1 = g(t - h), g0 = g(t), gp1 = g(t + h), gp2 = g(t + 2 * h);
  const double d1 = (gm2 - 8 * gm1 + 8 * gp1 - gp2) / (12 * h);
  const double d2 = (-gm2 + 16 * gm1 - 30 * g0 + 16 * gp1 - gp2) / (12 * h * h);
  return 0.5 * d2 + 0.5 * d1 - g0;
}

CriterionResult indicialAlgebra(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(0.0, 6.0), lam(0.0, 50.0);
  std::uniform_int_distribution<int> logs(0, 4);
  auto m = pointModel();
  double worstN = 0.0, worstVieta = 0.0;
  for (int n = 0; n < 200; ++n) {
    const double i = expo(rng);
    const int j = logs(rng);
    const double lambda = lam(rng);
    const PhgSeries s = PhgSeries::monomial(m, {i, j}, m->constant(1.0));
    const PhgSeries ns = applyN(s);
    const double x = 0.5;
    const double exact = ns.evaluate(x)[0];
    const double fd = indicialByDifferences([&](double y) { return s.evaluate(y)[0]; }, x, 1e-3);
    const double size = std::max({std::abs(exact), std::abs(s.evaluate(x)[0]), 1e-300});
    worstN = std::max(worstN, std::abs(exact - fd) / size);

    const IndicialRoots r = characteristicRoots(lambda);
    const double sum = std::abs(r.mBar + r.mUnder + 1.0);
    const double prod = std::abs(r.mBar * r.mUnder + 2.0 * (1.0 + lambda)) / (2.0 * (1.0 + lambda));
    worstVieta = std::max({worstVieta, sum, prod});
  }
  return {1, "indicial algebra", worstN < 1e-6 && worstVieta < 1e-12,
          "applyN vs differences " + fmt(worstN) + ", Vieta " + fmt(worstVieta)};
}

CriterionResult resonanceArithmetic(std::uint64_t) {
  const auto r0 = characteristicRoots(0.0);
  const auto r5 = characteristicRoots(5.0);
  const auto big = characteristicRoots(1e6);
  const bool exact0 = r0.mBar == 1.0 && r0.mUnder == -2.0 && r0.exactBar && *r0.exactBar == Rational(1) &&
                      r0.exactUnder && *r0.exactUnder == Rational(-2);
  const bool exact5 = r5.mBar == 3.0 && r5.mUnder == -4.0 && r5.exactBar && *r5.exactBar == Rational(3) &&
                      r5.exactUnder && *r5.exactUnder == Rational(-4);
  const double ratio = big.mBar / std::sqrt(2e6);
  return {2, "resonance arithmetic", exact0 && exact5 && std::abs(ratio - 1.0) < 1e-3,
          "λ=0 → (" + fmt(r0.mBar) + ", " + fmt(r0.mUnder) + "), λ=5 → (" + fmt(r5.mBar) + ", " +
              fmt(r5.mUnder) + "), m̄/√(2λ) at 1e6 = " + fmt(ratio)};
}

CriterionResult indexMonoid(std::uint64_t) {
  const double g = (-1.0 + std::sqrt(17.0)) / 2.0;
  const IndexSet I = buildIndexSet(std::vector<double>{1.0, g}, 3.2);
  std::vector<double> brute;
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; b <= 4; ++b) {
      const double v = a + b * g;
      if (v <= 3.2 + 1e-9) brute.push_back(v);
    }
  }
  std::sort(brute.begin(), brute.end());
  brute.erase(std::unique(brute.begin(), brute.end(), [](double x, double y) { return std::abs(x - y) <= 1e-9; }),
              brute.end());
  bool match = I.size() == 7 && brute.size() == 7;
  for (std::size_t n = 0; match && n < 7; ++n) match = std::abs(I[n] - brute[n]) <= 1e-9;
  std::string elems;
  for (double e : I.elements()) elems += (elems.empty() ? "" : ", ") + fmt(e);
  return {3, "index monoid", match, "{" + elems + "}"};
}

CriterionResult c11Law(std::uint64_t) {
  bool ok = true;
  std::string detail;
  RunConfig cfg;
  for (double a : {0.03, 0.06, 0.09}) {
    const auto r = runProblem(cfg, pointProblem(a, 0.0, indexCutoffFor(cfg.order)));
    const auto c = oracleValue(r.report, {1, 1}, 0);
    const double want = (2.0 / 3.0) * a;
    const double rel = c ? std::abs(*c - want) / want : INFINITY;
    ok = ok && rel <= 0.02;
    detail += (detail.empty() ? "" : "; ") + std::string("a=") + fmt(a) + ": " + (c ? fmt(*c) : "missing") +
              " (rel " + fmt(rel) + ")";
  }
  return {4, "c11 law", ok, detail};
}

CriterionResult orderDescent(std::uint64_t) {
  std::vector<ModelProblem> problems;
  problems.push_back(pointProblem(0.03, 0.3, 6.0));
  problems.push_back(findScenario("circle-resonant").build(6.0));
  problems.push_back(findScenario("circle-nonresonant").build(6.0));
  bool ok = true;
  std::size_t steps = 0;
  double worst = 0.0;
  for (const auto& p : problems) {
    const FormalSolution f = formalExpansion(p, 3.0);
    const double scale = std::max(p.scale(), f.psi.coefficientScale());
    for (const auto& s : f.steps) {
      ++steps;
      worst = std::max(worst, s.targetAfter / scale);
      const bool advanced = !s.nextLeading || precedes(s.target, *s.nextLeading);
      ok = ok && s.targetAfter <= 1e-11 * scale && advanced;
    }
  }
  return {5, "order descent", ok && steps > 0,
          std::to_string(steps) + " steps, worst targeted residual " + fmt(worst) + "·scale"};
}

CriterionResult modeOdeFormula(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> lam(0.0, 20.0), coef(-1.0, 1.0), datum(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(0, 3), logs(0, 2), count(1, 3);
  // The 4th-order stencil's own truncation error is about 1e-6 at n = 512
  // for cubic forcing and drops 16x per doubling; n = 1024 keeps it below.
  const Grid grid = makeGrid(0.1, 1e-6, 1024);
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    const double lambda = lam(rng);
    struct Term {
      double c, e;
      int j;
    };
    std::vector<Term> terms(count(rng));
    for (auto& t : terms) t = {coef(rng), double(expo(rng)), logs(rng)};
    auto F = [&](double x) {
      double s = 0.0;
      for (const auto& t : terms) s += t.c * std::pow(x, t.e) * std::pow(std::log(x), t.j);
      return s;
    };
    const ModeSolution sol = solveModeODE(lambda, F, datum(rng), grid);
    const double h = std::log(grid.points[1] / grid.points[0]);
    const std::size_t g = grid.points.size();
    for (std::size_t k = g / 6; k < g - g / 6; ++k) {
      const auto& v = sol.values;
      const double d1 = (v[k - 2] - 8 * v[k - 1] + 8 * v[k + 1] - v[k + 2]) / (12 * h);
      const double d2 = (-v[k - 2] + 16 * v[k - 1] - 30 * v[k] + 16 * v[k + 1] - v[k + 2]) / (12 * h * h);
      const double x = grid.points[k];
      const double res = -lambda * v[k] + 0.5 * d2 + 0.5 * d1 - v[k] - F(x);
      // Relative to the size of the terms that cancel.
      const double size = std::max(
          std::abs(F(x)) + (1.0 + lambda) * std::abs(v[k]) + 0.5 * std::abs(d2) + 0.5 * std::abs(d1), 1e-300);
      worst = std::max(worst, std::abs(res) / size);
    }
  }
  // Pure kernel: v = v₀ (x/x₀)^{m̄}.
  double kernelWorst = 0.0;
  for (double lambda : {0.0, 1.0, 7.5}) {
    const double v0 = 0.7;
    const ModeSolution sol = solveModeODE(lambda, [](double) { return 0.0; }, v0, grid);
    const double mb = characteristicRoots(lambda).mBar;
    for (std::size_t k = 0; k < grid.points.size(); ++k) {
      const double want = v0 * std::pow(grid.points[k] / grid.x0, mb);
      kernelWorst = std::max(kernelWorst, std::abs(sol.values[k] - want) / std::abs(want));
    }
  }
  return {6, "mode ODE formula", worst < 1e-6 && kernelWorst < 1e-8,
          "worst interior residual " + fmt(worst) + " (n=" + std::to_string(grid.count) + "), kernel case " +
              fmt(kernelWorst)};
}

CriterionResult logAtResonance(std::uint64_t) {
  bool ok = true;
  std::string failed;
  RunConfig cfg;
  for (const auto& s : bundledScenarios()) {
    cfg.scenario = s.name;
    cfg.order = s.order;
    const auto r = runPipeline(cfg);
    for (const auto& c : r.checks) {
      if ((c.name == "log-raise-at-resonance" || c.name == "no-unexplained-log" || c.name == "log-free") &&
          !c.pass) {
        ok = false;
        failed += (failed.empty() ? "" : "; ") + s.name + ": " + c.name + " (" + c.detail + ")";
      }
    }
  }
  return {7, "log only at resonance", ok,
          ok ? std::to_string(bundledScenarios().size()) + " scenarios, logs raised only at resonant indices"
             : failed};
}

CriterionResult remainderOrders(std::uint64_t) {
  RunConfig cfg;
  const auto r = runProblem(cfg, pointProblem(0.03, 0.3, indexCutoffFor(cfg.order)));
  bool ok = true;
  std::string detail;
  for (double k : {1.0, 2.0}) {
    const auto* s = slopeAt(r.report, k);
    ok = ok && s && s->pass;
    detail += (detail.empty() ? "" : "; ") + std::string("k=") + fmt(k) + ": " +
              (s ? fmt(s->slope) + " vs " + fmt(s->expected) : std::string("missing"));
  }
  return {8, "remainder orders", ok, detail};
}

CriterionResult spectralDecay(std::uint64_t) {
  const SpectralModel m = SpectralModel::circle(64, 1.0);
  const SpectralFunction w =
      m.projectSamples([](std::span<const double> p) { return std::exp(std::cos(p[0])); }, 256);
  // Resolved range: coefficients above the rounding floor.
  const double floor = 1e-13 * w.maxAbs();
  std::vector<double> lx, ly;
  for (std::size_t l = 1; l < m.size(); ++l) {
    if (std::abs(w[l]) > floor) {
      lx.push_back(std::log(m.eigenvalue(l)));
      ly.push_back(std::log(std::abs(w[l])));
    }
  }
  auto slopeOf = [](const std::vector<double>& x, const std::vector<double>& y, std::size_t from) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size() - from);
    for (std::size_t k = from; k < x.size(); ++k) {
      sx += x[k];
      sy += y[k];
      sxx += x[k] * x[k];
      sxy += x[k] * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  // Superpolynomial decay steepens with λ, so the exponent is read off the
  // upper half of the resolved range; the full-range value is reported too.
  const double slope = slopeOf(lx, ly, lx.size() / 2);
  const double fullSlope = slopeOf(lx, ly, 0);

  // Band-limited: cos θ·(1 + sin 2θ) lives on frequencies ≤ 3.
  const SpectralFunction one = m.constant(1.0);
  const SpectralFunction band =
      m.multiply(SpectralFunction::unit(m.size(), 1), one + SpectralFunction::unit(m.size(), 4));
  bool zeroBeyond = true;
  for (std::size_t l = 7; l < m.size(); ++l) zeroBeyond = zeroBeyond && band[l] == 0.0;
  return {9, "spectral decay", slope < -6.0 && zeroBeyond,
          "fitted slope " + fmt(slope) + " over the upper " + std::to_string(lx.size() - lx.size() / 2) + " of " +
              std::to_string(lx.size()) + " resolved modes (full range " + fmt(fullSlope) + "); band-limited tail exactly zero: " + (zeroBeyond ? "yes" : "no")};
}

CriterionResult gaugeFreedom(std::uint64_t) {
  RunConfig cfg;
  const double cutoff = indexCutoffFor(cfg.order);
  const auto base = runProblem(cfg, pointProblem(0.03, 0.3, cutoff));
  const double delta = 1e-3;
  RunConfig shifted = cfg;
  shifted.boundaryGauge = {{1.0, 0, delta}};
  const auto moved = runProblem(shifted, pointProblem(0.03, 0.3, cutoff));

  auto freeValue = [](const ExpansionReport& r) {
    for (const auto& fc : r.fittedFreeComponents) {
      if (std::abs(fc.exponent - 1.0) <= kIndexTolerance && fc.mode == 0) return fc.value;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double shift = freeValue(moved.report) - freeValue(base.report);
  const double rel = std::abs(shift - delta) / delta;
  double slopeShift = 0.0;
  for (double k : {1.0, 2.0}) {
    const auto* a = slopeAt(base.report, k);
    const auto* b = slopeAt(moved.report, k);
    slopeShift = (a && b) ? std::max(slopeShift, std::abs(a->slope - b->slope)) : INFINITY;
  }
  // The formal residual keeps its leading order under the same change.
  const ModelProblem p = pointProblem(0.03, 0.3, cutoff);
  FormalOptions fo;
  fo.prescribed = {{1.0, 0, delta}};
  const auto r0 = formalExpansion(p, 2.0).finalResidual.leading();
  const auto r1 = formalExpansion(p, 2.0, fo).finalResidual.leading();
  const bool sameLead = r0 && r1 && sameMonomial(r0->monomial, r1->monomial);
  return {10, "gauge freedom", rel <= 0.02 && slopeShift < 0.05 && sameLead,
          "free component shift " + fmt(shift) + " for δ=" + fmt(delta) + " (rel " + fmt(rel) +
              "), slope shift " + fmt(slopeShift) + ", residual lead " +
              (sameLead ? "unchanged" : "changed")};
}

}  // namespace

CriterionResult runCriterion(int id, std::uint64_t seed) {
  static const std::vector<std::pair<const char*, CriterionResult (*)(std::uint64_t)>> table = {
      {"indicial algebra", indicialAlgebra},   {"resonance arithmetic", resonanceArithmetic},
      {"index monoid", indexMonoid},           {"c11 law", c11Law},
      {"order descent", orderDescent},         {"mode ODE formula", modeOdeFormula},
      {"log only at resonance", logAtResonance}, {"remainder orders", remainderOrders},
      {"spectral decay", spectralDecay},       {"gauge freedom", gaugeFreedom},
  };
  if (id < 1 || id > kCriterionCount) throw InputError("acceptance", "no criterion " + std::to_string(id));
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = table[id - 1].second(seed);
  } catch (const std::exception& e) {
    r = {id, table[id - 1].first, false, std::string("error: ") + e.what()};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> runAcceptance(std::uint64_t seed, const std::vector<int>& only) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) out.push_back(runCriterion(id, seed));
  }
  return out;
}

std::string formatCriterion(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d  %-22s", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str());
  char tail[32];
  std::snprintf(tail, sizeof tail, " (%.2f s)", r.seconds);
  return std::string(head) + " " + r.detail + tail;
}

}  // namespace phg
