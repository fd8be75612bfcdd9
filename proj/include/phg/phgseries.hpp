#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phg/indices.hpp"
#include "phg/rational.hpp"
#include "phg/spectral.hpp"

namespace phg {

inline constexpr double kInfiniteOrder = std::numeric_limits<double>::infinity();

// x^exponent (log x)^logPower.
struct LogMonomial {
  double exponent = 0.0;
  int logPower = 0;
};

// Series order: exponent ascending, then log power descending, so that the
// first term is the dominant one as x → 0.
bool precedes(const LogMonomial& a, const LogMonomial& b) noexcept;
bool sameMonomial(const LogMonomial& a, const LogMonomial& b) noexcept;

struct SeriesTerm {
  LogMonomial monomial;
  SpectralFunction coeff;
};

// Σ c_{i,j} x^i (log x)^j with coefficients in the eigenbasis of a spectral
// model; everything above `truncation` is discarded. Immutable value type.
class PhgSeries {
 public:
  explicit PhgSeries(std::shared_ptr<const SpectralModel> model, double truncation = kInfiniteOrder,
                     std::shared_ptr<const IndexSet> indices = nullptr);

  static PhgSeries monomial(std::shared_ptr<const SpectralModel> model, LogMonomial m,
                            SpectralFunction coeff, double truncation = kInfiniteOrder,
                            std::shared_ptr<const IndexSet> indices = nullptr);
  // The constant function `value` (exponent 0, no log).
  static PhgSeries constant(std::shared_ptr<const SpectralModel> model, double value,
                            double truncation = kInfiniteOrder,
                            std::shared_ptr<const IndexSet> indices = nullptr);

  const SpectralModel& model() const noexcept { return *model_; }
  const std::shared_ptr<const SpectralModel>& modelPtr() const noexcept { return model_; }
  const std::shared_ptr<const IndexSet>& indicesPtr() const noexcept { return indices_; }
  double truncation() const noexcept { return truncation_; }
  const std::vector<SeriesTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  // Zero function when the monomial is absent.
  SpectralFunction coefficient(double exponent, int logPower) const;
  std::optional<SeriesTerm> leading() const;
  double minExponent() const noexcept;
  // Largest log power stored at `exponent`, or -1.
  int maxLogPower(double exponent) const noexcept;
  double coefficientScale() const noexcept;  // max |coefficient entry|

  SpectralFunction evaluate(double x) const;

  // Adds coeff·m to the series.
  PhgSeries withTerm(LogMonomial m, const SpectralFunction& coeff) const;
  PhgSeries withTruncation(double truncation) const;
  PhgSeries withIndices(std::shared_ptr<const IndexSet> indices) const;
  // Terms with exponent ≤ order (the partial sum ψ_order).
  PhgSeries partialSum(double order) const;
  // Drops terms whose coefficient entries are all ≤ tolerance in magnitude.
  PhgSeries pruned(double tolerance) const;

  friend PhgSeries add(const PhgSeries& a, const PhgSeries& b);
  friend PhgSeries multiply(const PhgSeries& a, const PhgSeries& b);
  friend PhgSeries scale(double s, const PhgSeries& a);
  friend PhgSeries applyN(const PhgSeries& s);
  friend PhgSeries applyNTilde(const PhgSeries& s);
  friend PhgSeries applyLaplacian(const PhgSeries& s);

 private:
  // Adds c·m into terms_, keeping the order and merging equal monomials.
  void accumulate(LogMonomial m, const SpectralFunction& coeff);
  void dropZeros();
  PhgSeries emptyLike(double truncation) const;

  std::shared_ptr<const SpectralModel> model_;
  std::shared_ptr<const IndexSet> indices_;
  double truncation_;
  std::vector<SeriesTerm> terms_;
};

PhgSeries add(const PhgSeries& a, const PhgSeries& b);
PhgSeries subtract(const PhgSeries& a, const PhgSeries& b);
PhgSeries scale(double s, const PhgSeries& a);
PhgSeries multiply(const PhgSeries& a, const PhgSeries& b);
// N = ½x²∂²_x + x∂_x − 1 applied termwise (exact indicial action).
PhgSeries applyN(const PhgSeries& s);
// Ñ = N + 1 = ½x²∂²_x + x∂_x.
PhgSeries applyNTilde(const PhgSeries& s);
PhgSeries applyLaplacian(const PhgSeries& s);

// Analytic germ G(t) = Σ_{n≥1} g_n tⁿ with G(0) = 0, G′(0) = 1.
class AnalyticGerm {
 public:
  static AnalyticGerm identity();
  static AnalyticGerm log1p();   // log(1 + t)
  static AnalyticGerm expm1();   // eᵗ − 1
  // Finite Taylor list g_0, g_1, ...; g_0 must be 0 and g_1 must be 1.
  static AnalyticGerm fromTaylor(std::vector<double> taylor, std::string name = "taylor");

  const std::string& name() const noexcept { return name_; }
  double coefficient(int n) const;
  // Number of stored coefficients; 0 means an infinite closed-form germ.
  std::size_t explicitLength() const noexcept { return taylor_.size(); }
  const std::vector<double>& taylor() const noexcept { return taylor_; }

  // G(w) − w for a function on D, summed until terms drop below `tolerance`.
  SpectralFunction nonlinearPart(const SpectralModel& model, const SpectralFunction& w,
                                 double tolerance = 1e-18, int maxTerms = 60) const;

 private:
  AnalyticGerm(std::string name, std::function<double(int)> coeff, std::vector<double> taylor = {})
      : name_(std::move(name)), coeff_(std::move(coeff)), taylor_(std::move(taylor)) {}
  std::string name_;
  std::function<double(int)> coeff_;
  std::vector<double> taylor_;
};

// G(s) by Horner evaluation in the series ring. `s` must have no exponent-0
// term and a finite truncation.
PhgSeries composeAnalytic(const AnalyticGerm& germ, const PhgSeries& s);

// One term c·x^exponent (log x)^logPower of a closed-form antiderivative.
template <typename Scalar>
struct MonomialIntegralTerm {
  Scalar exponent;
  int logPower;
  Scalar coefficient;
};

// ∫ x^{a−1} (log x)^j dx.
std::vector<MonomialIntegralTerm<double>> integrateMonomial(double a, int j);
std::vector<MonomialIntegralTerm<Rational>> integrateMonomial(Rational a, int j);

}  // namespace phg
