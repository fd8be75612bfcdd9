#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phg/formal.hpp"
#include "phg/modeode.hpp"
#include "phg/phgseries.hpp"

namespace phg {

// log|y| − j·log|log x| ≈ slope·log x + intercept, j chosen by least RMS.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  int logPower = 0;
  double rms = 0.0;
  std::size_t points = 0;
};

SlopeFit fitLogLogSlope(std::span<const double> x, std::span<const double> y, int maxLogPower);

struct MonomialFit {
  std::vector<LogMonomial> basis;
  std::vector<double> coefficients;
  double residualRms = 0.0;  // in the weighted metric
};

// Least squares y ≈ Σ a_b x^{i_b}(log x)^{j_b} with rows weighted by
// x^{−weightExponent}; columns are rescaled internally.
MonomialFit fitMonomials(std::span<const double> x, std::span<const double> y,
                         const std::vector<LogMonomial>& basis, double weightExponent);

struct RemainderSlope {
  double k = 0.0;
  double expected = 0.0;  // k₊
  double slope = 0.0;
  int logPower = 0;
  std::size_t points = 0;
  bool pass = false;     // |slope − k₊| within tolerance
  bool bounded = false;  // slope ≥ k₊ − tolerance, i.e. R_k = O(x^{k₊})
};

struct CoefficientComparison {
  double exponent = 0.0;
  int logPower = 0;
  std::size_t mode = 0;
  double formal = 0.0;
  double oracle = 0.0;
  double discrepancy = 0.0;  // |formal − oracle|
  double relative = 0.0;     // discrepancy / max(|formal|, floor)
  bool free = false;         // resonant kernel slot
};

struct ExpansionReport {
  FormalSolution formal;  // re-expanded with the fitted free components
  std::vector<FreeComponent> fittedFreeComponents;
  std::vector<RemainderSlope> remainderSlopes;
  std::vector<CoefficientComparison> discrepancies;
  double order = 0.0;
  double windowLo = 0.0;
  double windowHi = 0.0;
};

struct FitOptions {
  double windowLoFactor = 10.0;  // window starts at xMin·windowLoFactor
  double windowHiFactor = 0.1;   // and ends at x₀·windowHiFactor
  double slopeTolerance = 0.1;
  double extraOrder = 2.0;        // fit basis reaches order + extraOrder
  std::size_t freeIterations = 8;
  double relativeFloor = 1e-6;    // coefficients below floor·scale compare absolutely
};

// Indices of grid points inside [lo, hi]; throws when fewer than 16.
std::vector<std::size_t> fitWindow(const Grid& grid, double lo, double hi);

// Fitted kernel components c_{m̄_l,0} of the numerical solution, refined
// against the formal expansion until they stop changing.
std::vector<FreeComponent> extractFreeComponents(const std::vector<ModeSolution>& v, const Grid& grid,
                                                 const ModelProblem& p, double fitOrder,
                                                 const FitOptions& options = {});

ExpansionReport fitRemainder(const std::vector<ModeSolution>& v, const Grid& grid, const ModelProblem& p,
                             double order, const FitOptions& options = {});

// Fitted coefficients of log monomials that the formal solution does not
// contain: one extra log power at every index up to `order`, per mode.
struct LogProbe {
  double exponent = 0.0;
  int logPower = 0;
  std::size_t mode = 0;
  double value = 0.0;
};

std::vector<LogProbe> probeLogTerms(const std::vector<ModeSolution>& v, const Grid& grid,
                                    const ModelProblem& p, const ExpansionReport& report,
                                    const FitOptions& options = {});

// Highest index ≤ order + extra that still has a successor in the set.
double fitOrderFor(const IndexSet& I, double order, double extra);

}  // namespace phg
