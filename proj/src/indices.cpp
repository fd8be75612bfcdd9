#include "phg/indices.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "phg/error.hpp"

namespace phg {

IndicialRoots characteristicRoots(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InputError("indices", "eigenvalue must be finite and non-negative");
  }
  const double disc = 9.0 + 8.0 * lambda;
  const double s = std::sqrt(disc);
  IndicialRoots r;
  r.eigenvalue = lambda;
  // Rational fast path: √(9+8λ) = p/q with a small denominator.
  for (std::int64_t q = 1; q <= 64; ++q) {
    const double p = std::round(s * double(q));
    if (p < 1e15 && std::abs(s * double(q) - p) <= 1e-12 * double(q) * std::max(1.0, s)) {
      const auto pi = static_cast<std::int64_t>(p);
      r.exactBar = Rational(pi - q, 2 * q);
      r.exactUnder = Rational(-pi - q, 2 * q);
      r.mBar = r.exactBar->toDouble();
      r.mUnder = r.exactUnder->toDouble();
      return r;
    }
  }
  r.mBar = 0.5 * (-1.0 + s);
  r.mUnder = 0.5 * (-1.0 - s);
  return r;
}

std::vector<double> enumerateMonoid(const std::vector<double>& generators, double cutoff) {
  std::vector<double> elements{0.0};
  std::deque<double> frontier{0.0};
  auto insert = [&](double v) {
    auto it = std::lower_bound(elements.begin(), elements.end(), v - kIndexTolerance);
    if (it != elements.end() && std::abs(*it - v) <= kIndexTolerance) return false;
    elements.insert(it, v);
    return true;
  };
  while (!frontier.empty()) {
    const double e = frontier.front();
    frontier.pop_front();
    for (double g : generators) {
      const double v = e + g;
      if (v > cutoff + kIndexTolerance) continue;
      if (insert(v)) frontier.push_back(v);
    }
  }
  return elements;
}

IndexSet::IndexSet(double cutoff, std::vector<double> generators, std::vector<double> modeRoots)
    : cutoff_(cutoff), generators_(std::move(generators)), modeRoots_(std::move(modeRoots)) {
  std::sort(generators_.begin(), generators_.end());
  elements_ = enumerateMonoid(generators_, cutoff_);
  resonant_.assign(elements_.size(), {});
  for (std::size_t l = 0; l < modeRoots_.size(); ++l) {
    if (const auto n = find(modeRoots_[l])) resonant_[*n].push_back(l);
  }
}

std::optional<std::size_t> IndexSet::find(double value) const noexcept {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), value - kIndexTolerance);
  if (it != elements_.end() && std::abs(*it - value) <= kIndexTolerance) {
    return std::size_t(it - elements_.begin());
  }
  return std::nullopt;
}

std::optional<double> IndexSet::snap(double value) const noexcept {
  if (const auto n = find(value)) return elements_[*n];
  return std::nullopt;
}

bool IndexSet::isResonant(double value) const noexcept {
  const auto n = find(value);
  return n && !resonant_[*n].empty();
}

std::vector<std::size_t> IndexSet::resonantModesAt(double value) const {
  const auto n = find(value);
  return n ? resonant_[*n] : std::vector<std::size_t>{};
}

bool IndexSet::hasNext(double k) const noexcept {
  return !elements_.empty() && k + kIndexTolerance < elements_.back();
}

double IndexSet::nextIndex(double k) const {
  auto it = std::upper_bound(elements_.begin(), elements_.end(), k + kIndexTolerance);
  if (it == elements_.end()) {
    std::ostringstream os;
    os << "no element of the index set above " << k << " (cutoff " << cutoff_ << ")";
    throw InputError("indices", os.str());
  }
  return *it;
}

std::vector<EpsilonGap> IndexSet::epsilonLedger() const {
  std::vector<EpsilonGap> out;
  for (std::size_t n = 0; n + 1 < elements_.size(); ++n) {
    const double k = elements_[n];
    const double next = elements_[n + 1];
    double gap = next - k;
    for (double m : modeRoots_) {
      if (m > next + kIndexTolerance) gap = std::min(gap, m - next);
    }
    const double eps = gap / 2.0;
    if (!(eps > 0.0)) {
      throw NumericalError("indices", "non-positive epsilon gap at index " + std::to_string(k));
    }
    out.push_back({k, next, eps});
  }
  return out;
}

namespace {

std::vector<double> dedupeGenerators(std::vector<double> raw) {
  std::sort(raw.begin(), raw.end());
  std::vector<double> out;
  for (double g : raw) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw InputError("indices", "generators must be finite and positive");
    }
    if (!out.empty()) {
      const double diff = g - out.back();
      if (diff <= 1e-12) continue;  // repeated eigenvalue
      if (diff <= kIndexTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "generators " << out.back() << " and " << g
           << " are closer than the index tolerance (degenerate model)";
        throw InputError("indices", os.str());
      }
    }
    out.push_back(g);
  }
  return out;
}

}  // namespace

IndexSet buildIndexSet(const std::vector<double>& generators, double cutoff,
                       const std::vector<double>& modeRoots) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
    throw InputError("indices", "index set cutoff must be finite and positive");
  }
  return IndexSet(cutoff, dedupeGenerators(generators), modeRoots);
}

IndexSet buildIndexSet(const SpectralModel& model, double cutoff) {
  std::vector<double> roots;
  std::vector<double> generators{1.0};
  for (double lambda : model.eigenvalues()) {
    const double m = characteristicRoots(lambda).mBar;
    roots.push_back(m);
    if (m <= cutoff + kIndexTolerance) generators.push_back(m);
  }
  return buildIndexSet(generators, cutoff, roots);
}

}  // namespace phg
