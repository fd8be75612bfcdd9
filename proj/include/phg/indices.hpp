#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "phg/rational.hpp"
#include "phg/spectral.hpp"

namespace phg {

// Two monoid elements closer than this are the same exponent.
inline constexpr double kIndexTolerance = 1e-9;

// The two zeros of ½m² + ½m − 1 − λ. mBar ≥ 1 is the admissible branch.
struct IndicialRoots {
  double mBar = 1.0;
  double mUnder = -2.0;
  double eigenvalue = 0.0;
  // Present when 9 + 8λ is the square of a rational.
  std::optional<Rational> exactBar;
  std::optional<Rational> exactUnder;

  double gap() const noexcept { return mBar - mUnder; }
};

IndicialRoots characteristicRoots(double lambda);

// ½i² + ½i − 1: the shift μ(i) with N(x^i) = μ(i)·x^i.
constexpr double indicialShift(double i) noexcept { return 0.5 * i * i + 0.5 * i - 1.0; }

struct EpsilonGap {
  double index;
  double next;
  double epsilon;
};

// Sorted elements of the monoid generated by {1} ∪ {m̄_l}, cut at `cutoff`,
// with the eigen-modes l whose m̄_l coincides with each element.
class IndexSet {
 public:
  IndexSet() = default;
  // `modeRoots[l]` is m̄_l for every eigen-mode of the model (may be empty).
  IndexSet(double cutoff, std::vector<double> generators, std::vector<double> modeRoots);

  double cutoff() const noexcept { return cutoff_; }
  const std::vector<double>& generators() const noexcept { return generators_; }
  const std::vector<double>& elements() const noexcept { return elements_; }
  const std::vector<double>& modeRoots() const noexcept { return modeRoots_; }
  std::size_t size() const noexcept { return elements_.size(); }
  double operator[](std::size_t n) const { return elements_[n]; }

  std::optional<std::size_t> find(double value) const noexcept;
  bool contains(double value) const noexcept { return find(value).has_value(); }
  // Snaps `value` to the stored element it matches, or returns nullopt.
  std::optional<double> snap(double value) const noexcept;

  const std::vector<std::size_t>& resonantModes(std::size_t n) const { return resonant_.at(n); }
  bool isResonant(double value) const noexcept;
  // Modes l with m̄_l equal to `value` (empty when not resonant).
  std::vector<std::size_t> resonantModesAt(double value) const;

  // Smallest element greater than k; throws when k is the last one.
  double nextIndex(double k) const;
  bool hasNext(double k) const noexcept;

  // ε_k = min(k₊ − k, min over resonant m̄ > k₊ of (m̄ − k₊)) / 2 for every
  // consecutive pair (k, k₊).
  std::vector<EpsilonGap> epsilonLedger() const;

 private:
  double cutoff_ = 0.0;
  std::vector<double> generators_;
  std::vector<double> elements_;
  std::vector<double> modeRoots_;
  std::vector<std::vector<std::size_t>> resonant_;
};

// Enumerates the monoid generated by `generators` (plus 0) up to `cutoff`.
std::vector<double> enumerateMonoid(const std::vector<double>& generators, double cutoff);

IndexSet buildIndexSet(const SpectralModel& model, double cutoff);
// Monoid of explicit generators; resonance marks only where `modeRoots`
// (m̄ per mode) supplies them.
IndexSet buildIndexSet(const std::vector<double>& generators, double cutoff,
                       const std::vector<double>& modeRoots = {});

}  // namespace phg
