#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "phg/indices.hpp"
#include "phg/phgseries.hpp"
#include "phg/spectral.hpp"

namespace phg {

// The model cusp equation G(Lψ) − ψ = f + c₀ near D, with
// Lψ = Δ_Dψ + (1 + p)·Ñψ, Ñ = ½x²∂²_x + x∂_x and p = O(x) an optional
// operator perturbation. Its linearization at ψ = 0 is Δ_D + N.
struct ModelProblem {
  std::shared_ptr<const SpectralModel> model;
  std::shared_ptr<const IndexSet> indexSet;
  PhgSeries source;  // f, including its exponent-0 term −c₀
  double c0 = 0.0;
  AnalyticGerm nonlinearity = AnalyticGerm::log1p();
  std::optional<PhgSeries> operatorPerturbation;

  // f + c₀, i.e. the source without its constant term.
  PhgSeries forcing() const;
  double scale() const;  // size of the data, used for relative tolerances
};

// Validates the problem and reads c₀ off the constant term of `source`.
// Source exponents must lie in the index set with no log factors, and the
// constant term must be a constant function on D.
ModelProblem makeProblem(std::shared_ptr<const SpectralModel> model,
                         std::shared_ptr<const IndexSet> indexSet, const PhgSeries& source,
                         AnalyticGerm nonlinearity = AnalyticGerm::log1p(),
                         std::optional<PhgSeries> operatorPerturbation = std::nullopt);

// Kernel component of a resonant coefficient c_{m̄_l, 0}; not fixed by the
// local recursion.
struct FreeComponent {
  double exponent;
  std::size_t mode;
  double value;
};

struct FormalOptions {
  // Residual terms with all entries ≤ pruneTolerance·scale count as zero.
  double pruneTolerance = 1e-12;
  // 0 means the default 10·|I ∩ [0,k]|·max(1, max N_i).
  std::size_t iterationCap = 0;
  // Values for free components (default zero).
  std::vector<FreeComponent> prescribed;
};

struct StepRecord {
  LogMonomial target;
  bool resonant = false;
  bool logRaised = false;     // a ρ x^i (log x)^{j+1} term was added
  double targetBefore = 0.0;  // max |d_{i,j}| before the step
  double targetAfter = 0.0;   // max |coefficient at (i,j)| of the new residual
  std::optional<LogMonomial> nextLeading;
};

struct IndexLogRecord {
  double index;
  int forcingLogPower;   // log power of the residual when the recursion reached the index
  int producedLogPower;  // N_i actually produced
  bool resonant;
};

struct FormalSolution {
  PhgSeries psi;
  double order = 0.0;
  std::vector<std::pair<double, int>> logBounds;  // (i, N_i)
  std::vector<FreeComponent> freeComponents;
  std::vector<StepRecord> steps;
  std::vector<IndexLogRecord> logLedger;
  PhgSeries finalResidual;
};

// Q(ψ) = G(Lψ) − ψ − (f + c₀), truncated at ψ's truncation order.
PhgSeries residual(const ModelProblem& p, const PhgSeries& psi);

// Cancels the leading residual term of ψ (smallest exponent, then largest log
// power). Returns ψ unchanged when the residual vanishes.
PhgSeries stepCorrection(const ModelProblem& p, const PhgSeries& psi,
                         const FormalOptions& options = {}, StepRecord* record = nullptr);

FormalSolution formalExpansion(const ModelProblem& p, double order, const FormalOptions& options = {});

// c_{1,1} = (2/3)·⨍_D f̃₁ dv_D.
double firstLogCoefficient(const ModelProblem& p);

}  // namespace phg
