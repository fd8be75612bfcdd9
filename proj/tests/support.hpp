#pragma once

#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "phg/formal.hpp"
#include "phg/indices.hpp"
#include "phg/phgseries.hpp"
#include "phg/spectral.hpp"

namespace phgtest {

using ModelPtr = std::shared_ptr<const phg::SpectralModel>;

inline ModelPtr shared(phg::SpectralModel m) { return std::make_shared<const phg::SpectralModel>(std::move(m)); }

inline ModelPtr pointModel() { return shared(phg::SpectralModel::point()); }

inline std::shared_ptr<const phg::IndexSet> indexSetFor(const ModelPtr& m, double cutoff) {
  return std::make_shared<const phg::IndexSet>(phg::buildIndexSet(*m, cutoff));
}

// f = −c₀ + Σ (terms given by the caller).
inline phg::ModelProblem problemWith(const ModelPtr& m, double cutoff, double c0,
                                     const std::vector<std::pair<double, phg::SpectralFunction>>& terms,
                                     phg::AnalyticGerm g = phg::AnalyticGerm::log1p()) {
  auto I = indexSetFor(m, cutoff);
  auto f = phg::PhgSeries::constant(m, -c0, cutoff, I);
  for (const auto& [i, c] : terms) f = f.withTerm({i, 0}, c);
  return phg::makeProblem(m, I, f, std::move(g));
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace phgtest
