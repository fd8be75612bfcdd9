#include "phg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "phg/error.hpp"

namespace phg {

void RunConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("harness", std::string(what) + " must be positive");
  };
  positive(picardTol, "Picard tolerance");
  positive(slopeTolerance, "slope tolerance");
  positive(coefficientTolerance, "coefficient tolerance");
  positive(x0, "x0");
  positive(xMin, "xmin");
  if (!(xMin < x0) || x0 >= 1.0) throw InputError("harness", "grid needs 0 < xmin < x0 < 1");
  if (gridCount < 16) throw InputError("harness", "grid needs at least 16 points");
  if (maxIter == 0) throw InputError("harness", "maxIter must be positive");
  if (!(order > 0.0) || !std::isfinite(order)) throw InputError("harness", "order must be positive");
}

void parseGridSpec(const std::string& spec, RunConfig& cfg) {
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("harness", "grid entry \"" + item + "\" is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "x0") cfg.x0 = std::stod(value, &used);
      else if (key == "xmin") cfg.xMin = std::stod(value, &used);
      else if (key == "n") cfg.gridCount = std::stoul(value, &used);
      else throw InputError("harness", "unknown grid key \"" + key + "\"");
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw InputError("harness", "bad grid value \"" + value + "\" for " + key);
    }
  }
}

namespace {

std::shared_ptr<const SpectralModel> shared(SpectralModel m) {
  return std::make_shared<const SpectralModel>(std::move(m));
}

ModelProblem assemble(std::shared_ptr<const SpectralModel> model, double cutoff,
                      const std::function<PhgSeries(const std::shared_ptr<const SpectralModel>&)>& source) {
  auto I = std::make_shared<const IndexSet>(buildIndexSet(*model, cutoff));
  return makeProblem(model, I, source(model));
}

PhgSeries constantPlus(const std::shared_ptr<const SpectralModel>& m, double c0) {
  return PhgSeries(m).withTerm({0, 0}, m->constant(-c0));
}

std::vector<Scenario> makeScenarios() {
  const double sqrt2pi = std::sqrt(2.0 * std::numbers::pi);
  const double mBar1 = (-1.0 + std::sqrt(17.0)) / 2.0;
  std::vector<Scenario> out;

  out.push_back({"trivial-cusp", "point model, f ≡ −c₀; the solution vanishes identically",
                 [](double A) {
                   return assemble(shared(SpectralModel::point()), A,
                                   [](const auto& m) { return constantPlus(m, 0.5); });
                 },
                 2.0, {}, {}, true, true});

  out.push_back({"point-log", "point model, f̃₁ = 0.09; c₁,₁ = (2/3)f̃₁ = 0.06",
                 [](double A) {
                   return assemble(shared(SpectralModel::point()), A, [](const auto& m) {
                     return constantPlus(m, 0.5).withTerm({1, 0}, m->constant(0.09));
                   });
                 },
                 2.0,
                 {{"c_{1,1}", {1, 1}, 0, 0.06, 0.02, 0.0, "analytic"}},
                 {}, false, false});

  out.push_back({"point-orders", "point model, f̃₁ = 0.03, f̃₂ = 0.3; remainder orders k = 1, 2",
                 [](double A) {
                   return assemble(shared(SpectralModel::point()), A, [](const auto& m) {
                     return constantPlus(m, 0.5).withTerm({1, 0}, m->constant(0.03)).withTerm({2, 0}, m->constant(0.3));
                   });
                 },
                 2.0,
                 {{"c_{1,1}", {1, 1}, 0, 0.02, 0.02, 0.0, "analytic"}},
                 {1.0, 2.0}, false, false});

  // cos θ forcing exactly at m̄ = (−1 + √17)/2 of the λ = 1 mode.
  out.push_back({"circle-resonant", "circle model, cos θ forcing at the resonant index (−1+√17)/2",
                 [mBar1](double A) {
                   return assemble(shared(SpectralModel::circle(3, 1.0)), A, [mBar1](const auto& m) {
                     SpectralFunction f1 = m->constant(0.05);
                     f1[1] = 0.04;
                     return constantPlus(m, 0.5).withTerm({1, 0}, f1).withTerm(
                         {mBar1, 0}, SpectralFunction::unit(m->size(), 1, 0.1));
                   });
                 },
                 2.0,
                 {{"c_{1,1}", {1, 1}, 0, (2.0 / 3.0) * 0.05 * sqrt2pi, 0.02, 0.0, "analytic"},
                  {"c_{m,1} (cos θ)", {mBar1, 1}, 1, 0.1 / (mBar1 + 0.5), 0.02, 0.0, "derived"}},
                 {}, false, false});

  out.push_back({"circle-nonresonant", "circle model, mean-free forcing away from every resonance",
                 [](double A) {
                   return assemble(shared(SpectralModel::circle(5, 1.0)), A, [](const auto& m) {
                     return constantPlus(m, 0.5)
                         .withTerm({1, 0}, SpectralFunction::unit(m->size(), 1, 0.05))
                         .withTerm({2, 0}, SpectralFunction::unit(m->size(), 3, 0.1));
                   });
                 },
                 2.0, {}, {}, true, false});
  return out;
}

void check(std::vector<CheckResult>& checks, std::string name, bool pass, std::string detail) {
  checks.push_back({std::move(name), pass, std::move(detail)});
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string exact(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const std::vector<Scenario>& bundledScenarios() {
  static const std::vector<Scenario> scenarios = makeScenarios();
  return scenarios;
}

const Scenario& findScenario(const std::string& name) {
  for (const auto& s : bundledScenarios()) {
    if (s.name == name) return s;
  }
  std::string known;
  for (const auto& s : bundledScenarios()) known += (known.empty() ? "" : ", ") + s.name;
  throw InputError("harness", "unknown scenario \"" + name + "\" (known: " + known + ")");
}

double indexCutoffFor(double order) { return order + 3.0; }

ModelProblem problemFromJson(const io::Json& model, const io::Json& source, double cutoff) {
  auto m = io::modelFromJson(model);
  auto spec = io::sourceFromJson(source, m);
  auto I = std::make_shared<const IndexSet>(buildIndexSet(*m, cutoff));
  return makeProblem(m, I, spec.source, spec.nonlinearity, spec.perturbation);
}

ModelProblem loadProblem(const RunConfig& cfg, double cutoff) {
  if (!cfg.scenario.empty()) return findScenario(cfg.scenario).build(cutoff);
  return problemFromJson(io::readJsonFile(cfg.modelFile), io::readJsonFile(cfg.sourceFile), cutoff);
}

bool PipelineResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

PipelineResult runPipeline(const RunConfig& cfg) {
  if (cfg.scenario.empty() && (cfg.modelFile.empty() || cfg.sourceFile.empty())) {
    throw InputError("harness", "give either a scenario or both a model file and a source file");
  }
  const Scenario* scenario = cfg.scenario.empty() ? nullptr : &findScenario(cfg.scenario);
  return runProblem(cfg, loadProblem(cfg, indexCutoffFor(cfg.order)), scenario);
}

PipelineResult runProblem(const RunConfig& cfg, ModelProblem p, const Scenario* scenario) {
  cfg.validate();
  const IndexSet& I = *p.indexSet;
  const auto order = I.snap(cfg.order);
  if (!order) throw InputError("harness", "order " + fmt(cfg.order) + " is not an element of the index set");

  FitOptions fitOptions;
  fitOptions.slopeTolerance = cfg.slopeTolerance;
  const double fitOrder = fitOrderFor(I, *order, fitOptions.extraOrder);
  FormalOptions gauge;
  gauge.prescribed = cfg.boundaryGauge;
  const FormalSolution boundarySource = formalExpansion(p, fitOrder, gauge);

  const Grid grid = makeGrid(cfg.x0, cfg.xMin, cfg.gridCount);
  PicardOptions po;
  po.tol = cfg.picardTol;
  po.maxIter = cfg.maxIter;
  PicardResult picard = picardSolve(p, grid, boundaryDataFrom(boundarySource.psi, grid.x0), po);
  ExpansionReport report = fitRemainder(picard.modes, grid, p, *order, fitOptions);
  std::vector<LogProbe> probes = probeLogTerms(picard.modes, grid, p, report, fitOptions);

  std::vector<CheckResult> checks;
  check(checks, "picard-converged", picard.finalChange < cfg.picardTol,
        std::to_string(picard.iterations) + " iterations, final change " + fmt(picard.finalChange));

  double worst = 0.0;
  std::string worstAt = "none";
  for (const auto& c : report.discrepancies) {
    if (c.free) continue;
    if (c.relative > worst) {
      worst = c.relative;
      worstAt = "(" + fmt(c.exponent) + ", " + std::to_string(c.logPower) + ", mode " + std::to_string(c.mode) + ")";
    }
  }
  check(checks, "formal-oracle-agreement", worst <= cfg.coefficientTolerance,
        "worst relative discrepancy " + fmt(worst) + " at " + worstAt);

  bool bounded = true;
  std::string slopesDetail;
  for (const auto& s : report.remainderSlopes) {
    if (s.points < 16) continue;
    bounded = bounded && s.bounded;
    slopesDetail += (slopesDetail.empty() ? "" : "; ") + fmt(s.k) + ": " + fmt(s.slope) + " vs " + fmt(s.expected);
  }
  check(checks, "remainder-bounded", bounded, slopesDetail.empty() ? "no resolvable remainder" : slopesDetail);

  bool raisesResonant = true;
  for (const auto& r : report.formal.logLedger) {
    if (r.producedLogPower > std::max(r.forcingLogPower, 0) && !r.resonant) raisesResonant = false;
  }
  check(checks, "log-raise-at-resonance", raisesResonant, "log ledger of the formal solution");

  const double noise = 1e-4 * p.scale();
  double probeMax = 0.0;
  for (const auto& pr : probes) probeMax = std::max(probeMax, std::abs(pr.value));
  check(checks, "no-unexplained-log", probeMax <= noise,
        "largest fitted extra log coefficient " + fmt(probeMax) + " (noise level " + fmt(noise) + ")");

  if (scenario) {
    for (double k : scenario->slopeChecks) {
      const auto it = std::find_if(report.remainderSlopes.begin(), report.remainderSlopes.end(),
                                   [&](const RemainderSlope& s) { return std::abs(s.k - k) <= kIndexTolerance; });
      const bool ok = it != report.remainderSlopes.end() && it->pass;
      check(checks, "slope k=" + fmt(k), ok,
            it == report.remainderSlopes.end() ? "not computed"
                                               : fmt(it->slope) + " vs expected " + fmt(it->expected));
    }
    for (const auto& e : scenario->expectations) {
      const double formal = report.formal.psi.coefficient(e.monomial.exponent, e.monomial.logPower)[e.mode];
      std::optional<double> oracle;
      for (const auto& c : report.discrepancies) {
        if (c.mode == e.mode && sameMonomial({c.exponent, c.logPower}, e.monomial)) oracle = c.oracle;
      }
      auto within = [&](double v) {
        return e.value == 0.0 ? std::abs(v) <= e.absTol : std::abs(v - e.value) <= e.relTol * std::abs(e.value);
      };
      const bool ok = within(formal) && oracle && within(*oracle);
      check(checks, e.label, ok,
            "expected " + fmt(e.value) + " [" + e.provenance + "], formal " + fmt(formal) + ", oracle " +
                (oracle ? fmt(*oracle) : std::string("missing")));
    }
    if (scenario->expectLogFree) {
      bool none = true;
      for (const auto& t : report.formal.psi.terms()) none = none && t.monomial.logPower == 0;
      check(checks, "log-free", none && probeMax <= noise, "formal and fitted expansions carry no log term");
    }
    if (scenario->expectZero) {
      double sup = 0.0;
      for (const auto& m : picard.modes) {
        for (double x : m.values) sup = std::max(sup, std::abs(x));
      }
      check(checks, "zero-solution", sup == 0.0 && report.formal.psi.empty(),
            "sup|v| = " + fmt(sup) + ", formal terms " + std::to_string(report.formal.psi.size()));
    }
  }

  std::string label = scenario ? scenario->name
                     : cfg.modelFile.empty() ? std::string("problem")
                                             : cfg.modelFile.filename().string() + "+" + cfg.sourceFile.filename().string();
  return PipelineResult{std::move(p),      grid,   std::move(picard), std::move(report),
                        std::move(probes), std::move(checks), std::move(label)};
}

io::Json reportJson(const PipelineResult& r) {
  io::Json checks = io::Json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  io::Json probes = io::Json::array();
  for (const auto& pr : r.logProbes) {
    probes.push_back({{"i", pr.exponent}, {"j", pr.logPower}, {"mode", pr.mode}, {"value", pr.value}});
  }
  return io::Json{{"label", r.label},
                  {"model", r.problem.model->describe()},
                  {"nonlinearity", io::toJson(r.problem.nonlinearity)},
                  {"c0", r.problem.c0},
                  {"grid", {{"x0", r.grid.x0}, {"xmin", r.grid.xMin}, {"n", r.grid.count}}},
                  {"picard",
                   {{"iterations", r.picard.iterations}, {"final_change", r.picard.finalChange}}},
                  {"report", io::toJson(r.report)},
                  {"log_probes", std::move(probes)},
                  {"checks", std::move(checks)},
                  {"passed", r.passed()}};
}

std::string coefficientsCsv(const PipelineResult& r) {
  std::string out = "i,j,mode,value,provenance\n";
  auto row = [&](double i, int j, std::size_t mode, double value, const char* provenance) {
    out += exact(i) + "," + std::to_string(j) + "," + std::to_string(mode) + "," + exact(value) + "," + provenance + "\n";
  };
  for (const auto& t : r.report.formal.psi.terms()) {
    for (std::size_t l = 0; l < t.coeff.size(); ++l) {
      if (t.coeff[l] != 0.0) row(t.monomial.exponent, t.monomial.logPower, l, t.coeff[l], "formal");
    }
  }
  for (const auto& c : r.report.discrepancies) {
    row(c.exponent, c.logPower, c.mode, c.oracle, c.free ? "oracle-free" : "oracle");
  }
  return out;
}

std::string remaindersCsv(const ExpansionReport& r) {
  std::string out = "k,slope,expected,pass\n";
  for (const auto& s : r.remainderSlopes) {
    out += exact(s.k) + "," + (s.points ? exact(s.slope) : std::string("nan")) + "," + exact(s.expected) + "," +
           (s.pass ? "pass" : "fail") + "\n";
  }
  return out;
}

void emitReport(const PipelineResult& r, const std::filesystem::path& dir) {
  io::writeTextFile(dir / "coefficients.csv", coefficientsCsv(r));
  io::writeTextFile(dir / "remainders.csv", remaindersCsv(r.report));
  io::writeTextFile(dir / "report.json", io::dump(reportJson(r)));
}

int exitCodeFor(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    return int(e.kind());
  } catch (const std::invalid_argument&) {
    return 2;
  } catch (...) {
    return 3;
  }
}

}  // namespace phg
