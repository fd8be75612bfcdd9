#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "phg/error.hpp"
#include "phg/harness.hpp"
#include "support.hpp"

#ifndef PHG_CLI_PATH
#define PHG_CLI_PATH ""
#endif

using namespace phg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratchDir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("phg-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

int runCli(const std::string& args, const fs::path& outDir = {}) {
  std::string cmd;
  if (!outDir.empty()) cmd = "PHG_OUTPUT_DIR='" + outDir.string() + "' ";
  cmd += std::string("'") + PHG_CLI_PATH + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("bundled scenarios pass their checks") {
  for (const auto& s : bundledScenarios()) {
    CAPTURE(s.name);
    RunConfig cfg;
    cfg.scenario = s.name;
    cfg.order = s.order;
    auto r = runPipeline(cfg);
    for (const auto& c : r.checks) {
      CAPTURE(c.name);
      CAPTURE(c.detail);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("reports are deterministic") {
  RunConfig cfg;
  cfg.scenario = "point-log";
  const auto a = scratchDir("det-a"), b = scratchDir("det-b");
  emitReport(runPipeline(cfg), a);
  emitReport(runPipeline(cfg), b);
  for (const char* f : {"report.json", "coefficients.csv", "remainders.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("trivial cusp gives an empty expansion") {
  RunConfig cfg;
  cfg.scenario = "trivial-cusp";
  auto r = runPipeline(cfg);
  CHECK(r.passed());
  auto j = reportJson(r);
  CHECK(j["report"]["coefficients"]["terms"].empty());
  CHECK(j["passed"] == true);
  CHECK(coefficientsCsv(r).rfind("i,j,mode,value,provenance\n", 0) == 0);
  CHECK(remaindersCsv(r.report).rfind("k,slope,expected,pass\n", 0) == 0);
}

TEST_CASE("configuration validation") {
  RunConfig cfg;
  parseGridSpec("x0=0.2,n=300", cfg);
  CHECK(cfg.x0 == 0.2);
  CHECK(cfg.gridCount == 300);
  CHECK(cfg.xMin == 1e-6);
  CHECK_THROWS_AS(parseGridSpec("x0=abc", cfg), InputError);
  CHECK_THROWS_AS(parseGridSpec("depth=3", cfg), InputError);
  cfg.picardTol = -1;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  CHECK_THROWS_AS(findScenario("no-such-scenario"), InputError);
}

TEST_CASE("exit code mapping") {
  CHECK(exitCodeFor(std::make_exception_ptr(InputError("x", "y"))) == 2);
  CHECK(exitCodeFor(std::make_exception_ptr(NumericalError("x", "y"))) == 3);
  CHECK(exitCodeFor(std::make_exception_ptr(SolvabilityViolation("y"))) == 3);
}

TEST_CASE("command-line exit codes") {
  if (std::string(PHG_CLI_PATH).empty()) return;
  const auto out = scratchDir("cli");
  CHECK(runCli("verify --scenario point-log", out) == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(slurp(out / "remainders.csv").rfind("k,slope,expected,pass", 0) == 0);
  CHECK(runCli("verify --scenario point-log --tol 1e-3") == 1);
  CHECK(runCli("verify --scenario nope") == 2);
  CHECK(runCli("verify --scenario point-log --grid n=4") == 2);
  CHECK(runCli("verify --scenario point-log --max-iter 2") == 3);
  CHECK(runCli("frobnicate") == 2);
  CHECK(runCli("roots --lambda 5") == 0);
  CHECK(runCli("--help") == 0);
  fs::remove_all(out);
}
