#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phg/fit.hpp"
#include "phg/formal.hpp"
#include "phg/io.hpp"
#include "phg/modeode.hpp"

namespace phg {

struct RunConfig {
  std::filesystem::path modelFile;
  std::filesystem::path sourceFile;
  std::string scenario;  // selects a bundled problem instead of the two files
  double order = 2.0;
  double x0 = 0.1;
  double xMin = 1e-6;
  std::size_t gridCount = 512;
  double picardTol = 1e-13;
  std::size_t maxIter = 200;
  double slopeTolerance = 0.1;
  double coefficientTolerance = 0.02;  // relative, formal vs oracle
  std::filesystem::path outputDir;     // empty: nothing is written
  std::uint64_t seed = 0;
  // Kernel components added to the formal solution that supplies the
  // boundary data at x₀; other gauge choices only move these components.
  std::vector<FreeComponent> boundaryGauge;

  // Throws InputError when a tolerance or grid parameter is out of range.
  void validate() const;
};

// "x0=0.1,xmin=1e-6,n=512"; missing keys keep their current values.
void parseGridSpec(const std::string& spec, RunConfig& cfg);

// One expected value with its provenance label.
struct Expectation {
  std::string label;
  LogMonomial monomial;
  std::size_t mode = 0;
  double value = 0.0;
  double relTol = 0.02;
  double absTol = 0.0;  // used when value == 0
  std::string provenance;
};

struct Scenario {
  std::string name;
  std::string description;
  std::function<ModelProblem(double cutoff)> build;
  double order = 2.0;
  std::vector<Expectation> expectations;
  std::vector<double> slopeChecks;  // k with |slope − k₊| ≤ tol required
  bool expectLogFree = false;        // no log term anywhere, formal or fitted
  bool expectZero = false;           // ṽ ≡ 0 and ψ ≡ 0
};

const std::vector<Scenario>& bundledScenarios();
const Scenario& findScenario(const std::string& name);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct PipelineResult {
  ModelProblem problem;
  Grid grid;
  PicardResult picard;
  ExpansionReport report;
  std::vector<LogProbe> logProbes;
  std::vector<CheckResult> checks;
  std::string label;  // scenario name or the input file names

  bool passed() const;
};

// Index set, formal expansion, Picard solve with boundary data from the
// formal solution at x₀, remainder fit and the configured checks.
PipelineResult runPipeline(const RunConfig& cfg);
// The same for an already assembled problem; `scenario` adds its checks.
PipelineResult runProblem(const RunConfig& cfg, ModelProblem p, const Scenario* scenario = nullptr);

// Index-set cutoff used for a run of the given order.
double indexCutoffFor(double order);

// Loads the model/source pair (or the scenario) of `cfg` into a problem.
ModelProblem loadProblem(const RunConfig& cfg, double cutoff);
ModelProblem problemFromJson(const io::Json& model, const io::Json& source, double cutoff);

// Writes coefficients.csv, remainders.csv and report.json into `dir`.
void emitReport(const PipelineResult& r, const std::filesystem::path& dir);
io::Json reportJson(const PipelineResult& r);
std::string coefficientsCsv(const PipelineResult& r);
std::string remaindersCsv(const ExpansionReport& r);

// Exit code for the CLI: 0 pass, 1 failed check, 2 input error, 3 numerical failure.
int exitCodeFor(const std::exception_ptr& error);

}  // namespace phg
