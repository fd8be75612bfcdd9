// phg: command-line front end for the expansion library.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phg/acceptance.hpp"
#include "phg/error.hpp"
#include "phg/harness.hpp"
#include "phg/io.hpp"

namespace {

using phg::io::Json;

struct ProblemOptions {
  std::string model, source, scenario;
  double order = 2.0;
  std::string grid;
  double tol = 1e-13;
  std::size_t maxIter = 200;
};

void addProblemOptions(CLI::App* cmd, ProblemOptions& o, bool withGrid) {
  cmd->add_option("--model", o.model, "model file (JSON)");
  cmd->add_option("--source", o.source, "source expansion file (JSON)");
  cmd->add_option("--scenario", o.scenario, "bundled scenario instead of --model/--source");
  cmd->add_option("--order", o.order, "expansion order k (an element of the index set)")->capture_default_str();
  if (withGrid) {
    cmd->add_option("--grid", o.grid, "grid, e.g. \"x0=0.1,xmin=1e-6,n=512\"");
    cmd->add_option("--tol", o.tol, "Picard tolerance")->capture_default_str();
    cmd->add_option("--max-iter", o.maxIter, "Picard iteration limit")->capture_default_str();
  }
}

phg::RunConfig configFrom(const ProblemOptions& o, const std::string& outputDir, std::uint64_t seed) {
  phg::RunConfig cfg;
  cfg.modelFile = o.model;
  cfg.sourceFile = o.source;
  cfg.scenario = o.scenario;
  cfg.order = o.order;
  cfg.picardTol = o.tol;
  cfg.maxIter = o.maxIter;
  cfg.outputDir = outputDir;
  cfg.seed = seed;
  if (!o.grid.empty()) phg::parseGridSpec(o.grid, cfg);
  if (cfg.scenario.empty() && (cfg.modelFile.empty() || cfg.sourceFile.empty())) {
    throw phg::InputError("cli", "give --scenario or both --model and --source");
  }
  cfg.validate();
  return cfg;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmdRoots(const std::vector<double>& lambdas, const std::string& modelFile) {
  std::vector<double> ls = lambdas;
  if (!modelFile.empty()) {
    for (double l : phg::io::modelFromJson(phg::io::readJsonFile(modelFile))->eigenvalues()) ls.push_back(l);
  }
  if (ls.empty()) throw phg::InputError("cli", "give --lambda or --model");
  Json out = Json::array();
  for (double l : ls) out.push_back(phg::io::toJson(phg::characteristicRoots(l)));
  std::cout << phg::io::dump(out);
  return 0;
}

int cmdIndexSet(const ProblemOptions& o, double cutoff) {
  std::shared_ptr<const phg::SpectralModel> model;
  if (!o.scenario.empty()) {
    model = phg::findScenario(o.scenario).build(cutoff).model;
  } else if (!o.model.empty()) {
    model = phg::io::modelFromJson(phg::io::readJsonFile(o.model));
  } else {
    throw phg::InputError("cli", "give --model or --scenario");
  }
  const phg::IndexSet I = phg::buildIndexSet(*model, cutoff);
  std::cout << "index,resonant,modes\n";
  for (std::size_t n = 0; n < I.size(); ++n) {
    std::string modes;
    for (std::size_t l : I.resonantModes(n)) modes += (modes.empty() ? "" : " ") + std::to_string(l);
    std::cout << num(I[n]) << "," << (I.resonantModes(n).empty() ? 0 : 1) << "," << modes << "\n";
  }
  return 0;
}

int cmdExpand(const phg::RunConfig& cfg) {
  const phg::ModelProblem p = phg::loadProblem(cfg, phg::indexCutoffFor(cfg.order));
  const phg::FormalSolution f = phg::formalExpansion(p, cfg.order);
  const std::string text = phg::io::dump(phg::io::toJson(f));
  if (!cfg.outputDir.empty()) phg::io::writeTextFile(cfg.outputDir / "formal.json", text);
  std::cout << text;
  return 0;
}

int cmdSolve(const phg::RunConfig& cfg) {
  const phg::ModelProblem p = phg::loadProblem(cfg, phg::indexCutoffFor(cfg.order));
  const phg::FormalSolution f = phg::formalExpansion(p, cfg.order);
  const phg::Grid grid = phg::makeGrid(cfg.x0, cfg.xMin, cfg.gridCount);
  phg::PicardOptions po;
  po.tol = cfg.picardTol;
  po.maxIter = cfg.maxIter;
  const auto res = phg::picardSolve(p, grid, phg::boundaryDataFrom(f.psi, grid.x0), po);
  Json out = phg::io::toJson(res.modes, grid);
  out["picard"] = {{"iterations", res.iterations}, {"final_change", res.finalChange}};
  const std::string text = phg::io::dump(out);
  if (!cfg.outputDir.empty()) {
    std::string csv = "x,mode,value\n";
    for (const auto& m : res.modes) {
      for (std::size_t g = 0; g < grid.points.size(); ++g) {
        csv += num(grid.points[g]) + "," + std::to_string(m.modeIndex) + "," + num(m.values[g]) + "\n";
      }
    }
    phg::io::writeTextFile(cfg.outputDir / "modes.json", text);
    phg::io::writeTextFile(cfg.outputDir / "modes.csv", csv);
  }
  std::cout << text;
  return 0;
}

int cmdVerify(const phg::RunConfig& cfg) {
  const phg::PipelineResult r = phg::runPipeline(cfg);
  if (!cfg.outputDir.empty()) phg::emitReport(r, cfg.outputDir);
  std::cout << "k,slope,expected,pass\n";
  for (const auto& s : r.report.remainderSlopes) {
    std::cout << num(s.k) << "," << (s.points ? num(s.slope) : "nan") << "," << num(s.expected) << ","
              << (s.pass ? "pass" : "fail") << "\n";
  }
  for (const auto& c : r.checks) {
    std::cerr << (c.pass ? "ok   " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  return r.passed() ? 0 : 1;
}

int cmdVerifyAll(const std::string& outputDir, std::uint64_t seed) {
  bool ok = true;
  for (const auto& c : phg::runAcceptance(seed)) {
    std::cout << phg::formatCriterion(c) << "\n";
    ok = ok && c.pass;
  }
  for (const auto& s : phg::bundledScenarios()) {
    phg::RunConfig cfg;
    cfg.scenario = s.name;
    cfg.order = s.order;
    cfg.seed = seed;
    const phg::PipelineResult r = phg::runPipeline(cfg);
    if (!outputDir.empty()) phg::emitReport(r, std::filesystem::path(outputDir) / s.name);
    std::size_t passed = 0;
    for (const auto& c : r.checks) passed += c.pass;
    std::cout << (r.passed() ? "PASS" : "FAIL") << " scenario " << s.name << " (" << passed << "/"
              << r.checks.size() << " checks)\n";
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polyhomogeneous expansions of the cusp model problem, with a numerical oracle"};
  app.set_config("--config", "", "TOML file supplying option values");
  app.require_subcommand(1);
  app.fallthrough();
  std::string outputDir;
  std::uint64_t seed = 0;
  app.add_option("--output-dir", outputDir, "directory for report files")->envname("PHG_OUTPUT_DIR");
  app.add_option("--seed", seed, "seed for randomized draws")->capture_default_str();

  std::vector<double> lambdas;
  std::string rootsModel;
  auto* roots = app.add_subcommand("roots", "indicial roots m̄, m̲ of eigenvalues");
  roots->add_option("--lambda", lambdas, "eigenvalue(s)");
  roots->add_option("--model", rootsModel, "model file; all its eigenvalues");

  ProblemOptions idxOpts;
  double cutoff = 4.0;
  auto* indexset = app.add_subcommand("indexset", "index monoid with resonance marks, as CSV");
  indexset->add_option("--model", idxOpts.model, "model file (JSON)");
  indexset->add_option("--scenario", idxOpts.scenario, "bundled scenario");
  indexset->add_option("--cutoff", cutoff, "largest index")->capture_default_str();

  ProblemOptions expandOpts;
  auto* expand = app.add_subcommand("expand", "formal expansion to a given order (JSON)");
  addProblemOptions(expand, expandOpts, false);

  ProblemOptions solveOpts;
  auto* solve = app.add_subcommand("solve", "numerical mode solutions by Picard iteration");
  addProblemOptions(solve, solveOpts, true);

  ProblemOptions verifyOpts;
  bool all = false;
  auto* verify = app.add_subcommand("verify", "formal expansion checked against the numerical oracle");
  addProblemOptions(verify, verifyOpts, true);
  verify->add_flag("--all", all, "run every acceptance criterion and bundled scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*roots) return cmdRoots(lambdas, rootsModel);
    if (*indexset) return cmdIndexSet(idxOpts, cutoff);
    if (*expand) return cmdExpand(configFrom(expandOpts, outputDir, seed));
    if (*solve) return cmdSolve(configFrom(solveOpts, outputDir, seed));
    if (*verify) return all ? cmdVerifyAll(outputDir, seed) : cmdVerify(configFrom(verifyOpts, outputDir, seed));
  } catch (...) {
    const auto error = std::current_exception();
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      std::cerr << "phg: " << e.what() << "\n";
    } catch (...) {
      std::cerr << "phg: unknown error\n";
    }
    return phg::exitCodeFor(error);
  }
  return 2;
}
