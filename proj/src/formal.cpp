#include "phg/formal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phg/error.hpp"

namespace phg {

PhgSeries ModelProblem::forcing() const {
  PhgSeries out(source.modelPtr(), source.truncation(), source.indicesPtr());
  for (const auto& t : source.terms()) {
    if (t.monomial.exponent > kIndexTolerance) out = out.withTerm(t.monomial, t.coeff);
  }
  return out;
}

double ModelProblem::scale() const {
  double s = std::abs(c0);
  s = std::max(s, forcing().coefficientScale());
  return std::max(s, 1e-300);
}

ModelProblem makeProblem(std::shared_ptr<const SpectralModel> model,
                         std::shared_ptr<const IndexSet> indexSet, const PhgSeries& source,
                         AnalyticGerm nonlinearity, std::optional<PhgSeries> operatorPerturbation) {
  if (!model || !indexSet) throw InputError("formal", "problem needs a model and an index set");
  if (source.model().size() != model->size()) {
    throw InputError("formal", "source series does not match the spectral model");
  }
  if (nonlinearity.coefficient(0) != 0.0 || nonlinearity.coefficient(1) != 1.0) {
    throw InputError("formal", "nonlinearity needs G(0) = 0 and G'(0) = 1");
  }
  ModelProblem p{model, indexSet, source.withIndices(indexSet), 0.0, std::move(nonlinearity), {}};
  const auto kernel0 = model->eigenspace(0.0).kernelIndices;
  for (const auto& t : p.source.terms()) {
    if (t.monomial.logPower != 0) {
      throw InputError("formal", "source terms must not carry log factors");
    }
    if (t.monomial.exponent <= kIndexTolerance) {
      for (std::size_t l = 1; l < t.coeff.size(); ++l) {
        if (t.coeff[l] != 0.0) {
          throw InputError("formal",
                           "constant term of the source must be a constant function on D");
        }
      }
      p.c0 = -model->mean(t.coeff);
    }
  }
  if (operatorPerturbation) {
    auto pert = operatorPerturbation->withIndices(indexSet);
    if (!pert.empty() && pert.minExponent() < 1.0 - kIndexTolerance) {
      throw InputError("formal", "operator perturbation must be O(x)");
    }
    p.operatorPerturbation = std::move(pert);
  }
  return p;
}

PhgSeries residual(const ModelProblem& p, const PhgSeries& psi) {
  if (!psi.empty() && psi.minExponent() <= kIndexTolerance) {
    throw InputError("formal", "ψ must have strictly positive exponents");
  }
  if (psi.truncation() > p.indexSet->cutoff() + kIndexTolerance) {
    throw InputError("formal", "truncation order exceeds the index set cutoff");
  }
  const double order = psi.truncation();
  const PhgSeries nt = applyNTilde(psi);
  PhgSeries lpsi = add(applyLaplacian(psi), nt);
  if (p.operatorPerturbation) {
    lpsi = add(lpsi, multiply(p.operatorPerturbation->withTruncation(order), nt));
  }
  const PhgSeries g = composeAnalytic(p.nonlinearity, lpsi);
  return subtract(subtract(g, psi), p.forcing().withTruncation(order).withIndices(p.indexSet));
}

namespace {

double pruneLevel(const ModelProblem& p, const PhgSeries& psi, const FormalOptions& o) {
  return o.pruneTolerance * std::max(p.scale(), psi.coefficientScale());
}

// Entries at rounding level are set to exactly zero.
SpectralFunction chop(SpectralFunction f, double level) {
  for (std::size_t l = 0; l < f.size(); ++l) {
    if (std::abs(f[l]) <= level) f[l] = 0.0;
  }
  return f;
}

// Drops rounding debris relative to the largest entry; never zeroes the whole
// correction, so every step makes progress.
SpectralFunction relativeChop(const SpectralFunction& f) { return chop(f, 1e-15 * f.maxAbs()); }

PhgSeries correct(const ModelProblem& p, const PhgSeries& psi, const SeriesTerm& lead, double level,
                  StepRecord* record) {
  const double i = lead.monomial.exponent;
  const int j = lead.monomial.logPower;
  if (!p.indexSet->contains(i)) {
    std::ostringstream os;
    os << "residual exponent " << i << " is not in the index set (model inconsistency)";
    throw InputError("formal", os.str());
  }
  if (i <= kIndexTolerance) {
    throw InputError("formal", "residual has a constant term; the source constant must be −c0");
  }
  const SpectralModel& model = *p.model;
  const double mu = indicialShift(i);
  const auto kernel = model.eigenspace(mu).kernelIndices;
  PhgSeries out = psi;
  bool raised = false;
  if (kernel.empty()) {
    out = out.withTerm(lead.monomial, relativeChop(model.solveShiftedPoisson(-lead.coeff, mu)));
  } else {
    auto [d0, dPerp] = model.projectOntoEigenspace(lead.coeff, mu);
    d0 = chop(d0, level);
    if (!d0.isZero()) {
      const auto rho = (-1.0 / (double(j + 1) * (i + 0.5))) * d0;
      out = out.withTerm({i, j + 1}, rho);
      raised = true;
    }
    out = out.withTerm(lead.monomial, relativeChop(model.solveShiftedPoisson(-dPerp, mu)));
  }
  if (record) {
    record->target = lead.monomial;
    record->resonant = !kernel.empty();
    record->logRaised = raised;
    record->targetBefore = lead.coeff.maxAbs();
  }
  return out;
}

}  // namespace

PhgSeries stepCorrection(const ModelProblem& p, const PhgSeries& psi, const FormalOptions& options,
                         StepRecord* record) {
  const PhgSeries r = residual(p, psi).pruned(pruneLevel(p, psi, options));
  if (r.empty()) return psi;
  PhgSeries out = correct(p, psi, *r.leading(), pruneLevel(p, psi, options), record);
  if (record) {
    const PhgSeries after = residual(p, out);
    record->targetAfter = after.coefficient(record->target.exponent, record->target.logPower).maxAbs();
    const PhgSeries afterPruned = after.pruned(pruneLevel(p, out, options));
    if (auto next = afterPruned.leading()) record->nextLeading = next->monomial;
  }
  return out;
}

FormalSolution formalExpansion(const ModelProblem& p, double order, const FormalOptions& options) {
  const IndexSet& I = *p.indexSet;
  const auto snapped = I.snap(order);
  if (!snapped) {
    std::ostringstream os;
    os << "order " << order << " is not an element of the index set";
    throw InputError("formal", os.str());
  }
  order = *snapped;
  const double truncation = I.hasNext(order) ? I.nextIndex(order) : order;

  PhgSeries psi(p.model, truncation, p.indexSet);
  for (const auto& fc : options.prescribed) {
    const auto modes = I.resonantModesAt(fc.exponent);
    if (std::find(modes.begin(), modes.end(), fc.mode) == modes.end()) {
      std::ostringstream os;
      os << "prescribed free component at exponent " << fc.exponent << ", mode " << fc.mode
         << " is not a resonant slot";
      throw InputError("formal", os.str());
    }
    if (fc.exponent <= order + kIndexTolerance) {
      psi = psi.withTerm({fc.exponent, 0}, SpectralFunction::unit(p.model->size(), fc.mode, fc.value));
    }
  }

  std::size_t countBelow = 0;
  for (double e : I.elements()) {
    if (e > kIndexTolerance && e <= order + kIndexTolerance) ++countBelow;
  }

  FormalSolution sol{psi, order, {}, {}, {}, {}, psi};
  std::vector<std::pair<double, int>> forcingLog;
  std::size_t iterations = 0;
  while (true) {
    const PhgSeries r = residual(p, psi).pruned(pruneLevel(p, psi, options));
    const auto lead = r.leading();
    if (!lead || lead->monomial.exponent > order + kIndexTolerance) {
      sol.finalResidual = r;
      break;
    }
    const double i = lead->monomial.exponent;
    if (forcingLog.empty() || std::abs(forcingLog.back().first - i) > kIndexTolerance) {
      forcingLog.emplace_back(i, lead->monomial.logPower);
    }
    int maxN = 1;
    for (const auto& t : psi.terms()) maxN = std::max(maxN, t.monomial.logPower);
    const std::size_t cap =
        options.iterationCap ? options.iterationCap : 10 * std::max<std::size_t>(1, countBelow) * maxN;
    if (++iterations > cap) {
      throw NumericalError("formal", "iteration cap of " + std::to_string(cap) + " steps exceeded");
    }
    StepRecord rec;
    psi = correct(p, psi, *lead, pruneLevel(p, psi, options), &rec);
    const PhgSeries after = residual(p, psi);
    rec.targetAfter = after.coefficient(rec.target.exponent, rec.target.logPower).maxAbs();
    if (auto next = after.pruned(pruneLevel(p, psi, options)).leading()) rec.nextLeading = next->monomial;
    sol.steps.push_back(rec);
  }

  sol.psi = psi;
  for (double e : I.elements()) {
    if (e <= kIndexTolerance || e > order + kIndexTolerance) continue;
    const int n = psi.maxLogPower(e);
    if (n >= 0) sol.logBounds.emplace_back(e, n);
    const auto forcing = std::find_if(forcingLog.begin(), forcingLog.end(), [&](const auto& f) {
      return std::abs(f.first - e) <= kIndexTolerance;
    });
    if (n >= 0 || forcing != forcingLog.end()) {
      sol.logLedger.push_back({e, forcing == forcingLog.end() ? -1 : forcing->second, n,
                               I.isResonant(e)});
    }
    for (std::size_t l : I.resonantModesAt(e)) {
      sol.freeComponents.push_back({e, l, psi.coefficient(e, 0)[l]});
    }
  }
  return sol;
}

double firstLogCoefficient(const ModelProblem& p) {
  return (2.0 / 3.0) * p.model->mean(p.source.coefficient(1.0, 0));
}

}  // namespace phg
