#include "phg/phgseries.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phg/error.hpp"

namespace phg {

bool sameMonomial(const LogMonomial& a, const LogMonomial& b) noexcept {
  return a.logPower == b.logPower && std::abs(a.exponent - b.exponent) <= kIndexTolerance;
}

bool precedes(const LogMonomial& a, const LogMonomial& b) noexcept {
  if (std::abs(a.exponent - b.exponent) > kIndexTolerance) return a.exponent < b.exponent;
  return a.logPower > b.logPower;
}

PhgSeries::PhgSeries(std::shared_ptr<const SpectralModel> model, double truncation,
                     std::shared_ptr<const IndexSet> indices)
    : model_(std::move(model)), indices_(std::move(indices)), truncation_(truncation) {
  if (!model_) throw InputError("phgseries", "series needs a spectral model");
  if (std::isnan(truncation_)) throw InputError("phgseries", "truncation order is NaN");
}

PhgSeries PhgSeries::monomial(std::shared_ptr<const SpectralModel> model, LogMonomial m,
                              SpectralFunction coeff, double truncation,
                              std::shared_ptr<const IndexSet> indices) {
  PhgSeries s(std::move(model), truncation, std::move(indices));
  s.accumulate(m, coeff);
  s.dropZeros();
  return s;
}

PhgSeries PhgSeries::constant(std::shared_ptr<const SpectralModel> model, double value,
                              double truncation, std::shared_ptr<const IndexSet> indices) {
  auto c = model->constant(value);
  return monomial(std::move(model), {0.0, 0}, std::move(c), truncation, std::move(indices));
}

PhgSeries PhgSeries::emptyLike(double truncation) const {
  return PhgSeries(model_, truncation, indices_);
}

void PhgSeries::accumulate(LogMonomial m, const SpectralFunction& coeff) {
  model_->checkCompatible(coeff);
  if (m.logPower < 0) throw InputError("phgseries", "negative log power");
  if (!(m.exponent >= -kIndexTolerance) || !std::isfinite(m.exponent)) {
    throw InputError("phgseries", "exponents must be finite and non-negative");
  }
  if (m.exponent > truncation_ + kIndexTolerance) return;
  if (!coeff.isFinite()) throw NumericalError("phgseries", "non-finite series coefficient");
  if (indices_) {
    const auto snapped = indices_->snap(m.exponent);
    if (!snapped) {
      std::ostringstream os;
      os.precision(12);
      os << "exponent " << m.exponent << " is not in the index monoid (inconsistent model)";
      throw InputError("phgseries", os.str());
    }
    m.exponent = *snapped;
  }
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const SeriesTerm& t, const LogMonomial& key) {
                               return precedes(t.monomial, key);
                             });
  if (it != terms_.end() && sameMonomial(it->monomial, m)) {
    it->coeff += coeff;
  } else {
    terms_.insert(it, SeriesTerm{m, coeff});
  }
}

void PhgSeries::dropZeros() {
  std::erase_if(terms_, [](const SeriesTerm& t) { return t.coeff.isZero(); });
}

SpectralFunction PhgSeries::coefficient(double exponent, int logPower) const {
  for (const auto& t : terms_) {
    if (sameMonomial(t.monomial, {exponent, logPower})) return t.coeff;
  }
  return model_->zero();
}

std::optional<SeriesTerm> PhgSeries::leading() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.front();
}

double PhgSeries::minExponent() const noexcept {
  return terms_.empty() ? kInfiniteOrder : terms_.front().monomial.exponent;
}

int PhgSeries::maxLogPower(double exponent) const noexcept {
  int best = -1;
  for (const auto& t : terms_) {
    if (std::abs(t.monomial.exponent - exponent) <= kIndexTolerance) {
      best = std::max(best, t.monomial.logPower);
    }
  }
  return best;
}

double PhgSeries::coefficientScale() const noexcept {
  double s = 0.0;
  for (const auto& t : terms_) s = std::max(s, t.coeff.maxAbs());
  return s;
}

SpectralFunction PhgSeries::evaluate(double x) const {
  if (!(x > 0.0)) throw InputError("phgseries", "series evaluation needs x > 0");
  SpectralFunction out = model_->zero();
  const double lx = std::log(x);
  for (const auto& t : terms_) {
    const double w = std::pow(x, t.monomial.exponent) * std::pow(lx, t.monomial.logPower);
    out += w * t.coeff;
  }
  return out;
}

PhgSeries PhgSeries::withTerm(LogMonomial m, const SpectralFunction& coeff) const {
  PhgSeries out = *this;
  out.accumulate(m, coeff);
  out.dropZeros();
  return out;
}

PhgSeries PhgSeries::withTruncation(double truncation) const {
  PhgSeries out = emptyLike(truncation);
  for (const auto& t : terms_) {
    if (t.monomial.exponent <= truncation + kIndexTolerance) out.terms_.push_back(t);
  }
  return out;
}

PhgSeries PhgSeries::withIndices(std::shared_ptr<const IndexSet> indices) const {
  PhgSeries out(model_, truncation_, std::move(indices));
  for (const auto& t : terms_) out.accumulate(t.monomial, t.coeff);
  out.dropZeros();
  return out;
}

PhgSeries PhgSeries::partialSum(double order) const {
  PhgSeries out = emptyLike(truncation_);
  for (const auto& t : terms_) {
    if (t.monomial.exponent <= order + kIndexTolerance) out.terms_.push_back(t);
  }
  return out;
}

PhgSeries PhgSeries::pruned(double tolerance) const {
  PhgSeries out = emptyLike(truncation_);
  for (const auto& t : terms_) {
    if (t.coeff.maxAbs() > tolerance) out.terms_.push_back(t);
  }
  return out;
}

namespace {

void requireCompatible(const PhgSeries& a, const PhgSeries& b) {
  if (a.model().size() != b.model().size()) {
    throw InputError("phgseries", "series have different spectral dimensions (" +
                                      std::to_string(a.model().size()) + " vs " +
                                      std::to_string(b.model().size()) + ")");
  }
  if (!a.model().sameAs(b.model())) {
    throw InputError("phgseries", "series belong to different spectral models");
  }
}

std::shared_ptr<const IndexSet> pickIndices(const PhgSeries& a, const PhgSeries& b) {
  return a.indicesPtr() ? a.indicesPtr() : b.indicesPtr();
}

}  // namespace

PhgSeries add(const PhgSeries& a, const PhgSeries& b) {
  requireCompatible(a, b);
  PhgSeries out(a.modelPtr(), std::min(a.truncation(), b.truncation()), pickIndices(a, b));
  for (const auto& t : a.terms_) out.accumulate(t.monomial, t.coeff);
  for (const auto& t : b.terms_) out.accumulate(t.monomial, t.coeff);
  out.dropZeros();
  return out;
}

PhgSeries scale(double s, const PhgSeries& a) {
  PhgSeries out = a.emptyLike(a.truncation());
  for (const auto& t : a.terms_) out.terms_.push_back({t.monomial, s * t.coeff});
  out.dropZeros();
  return out;
}

PhgSeries subtract(const PhgSeries& a, const PhgSeries& b) { return add(a, scale(-1.0, b)); }

PhgSeries multiply(const PhgSeries& a, const PhgSeries& b) {
  requireCompatible(a, b);
  PhgSeries out(a.modelPtr(), std::min(a.truncation(), b.truncation()), pickIndices(a, b));
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      const LogMonomial m{ta.monomial.exponent + tb.monomial.exponent,
                          ta.monomial.logPower + tb.monomial.logPower};
      if (m.exponent > out.truncation_ + kIndexTolerance) continue;
      out.accumulate(m, a.model().multiply(ta.coeff, tb.coeff));
    }
  }
  out.dropZeros();
  return out;
}

namespace {

// N(x^i ℓ^j) = μ(i) x^iℓ^j + j(i+½) x^iℓ^{j−1} + ½j(j−1) x^iℓ^{j−2}, plus
// `shift`·x^iℓ^j (shift = 1 turns N into Ñ).
PhgSeries indicialAction(const PhgSeries& s, double shift, PhgSeries out) {
  for (const auto& t : s.terms()) {
    const double i = t.monomial.exponent;
    const int j = t.monomial.logPower;
    out = out.withTerm(t.monomial, (indicialShift(i) + shift) * t.coeff);
    if (j >= 1) out = out.withTerm({i, j - 1}, (double(j) * (i + 0.5)) * t.coeff);
    if (j >= 2) out = out.withTerm({i, j - 2}, (0.5 * double(j) * double(j - 1)) * t.coeff);
  }
  return out;
}

}  // namespace

PhgSeries applyN(const PhgSeries& s) { return indicialAction(s, 0.0, s.emptyLike(s.truncation())); }

PhgSeries applyNTilde(const PhgSeries& s) {
  return indicialAction(s, 1.0, s.emptyLike(s.truncation()));
}

PhgSeries applyLaplacian(const PhgSeries& s) {
  PhgSeries out = s.emptyLike(s.truncation());
  for (const auto& t : s.terms_) {
    out.terms_.push_back({t.monomial, s.model().applyLaplacian(t.coeff)});
  }
  out.dropZeros();
  return out;
}

// ---------------------------------------------------------------------------

AnalyticGerm AnalyticGerm::identity() {
  return AnalyticGerm("identity", [](int n) { return n == 1 ? 1.0 : 0.0; });
}

AnalyticGerm AnalyticGerm::log1p() {
  return AnalyticGerm("log1p", [](int n) {
    if (n < 1) return 0.0;
    return (n % 2 == 1 ? 1.0 : -1.0) / double(n);
  });
}

AnalyticGerm AnalyticGerm::expm1() {
  return AnalyticGerm("expm1", [](int n) {
    if (n < 1) return 0.0;
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= double(k);
    return 1.0 / f;
  });
}

AnalyticGerm AnalyticGerm::fromTaylor(std::vector<double> taylor, std::string name) {
  if (taylor.size() < 2 || taylor[0] != 0.0 || taylor[1] != 1.0) {
    throw InputError("phgseries", "analytic germ needs G(0) = 0 and G'(0) = 1");
  }
  for (double c : taylor) {
    if (!std::isfinite(c)) throw InputError("phgseries", "analytic germ has non-finite coefficients");
  }
  auto copy = taylor;
  return AnalyticGerm(
      std::move(name),
      [copy](int n) { return (n >= 0 && std::size_t(n) < copy.size()) ? copy[n] : 0.0; },
      std::move(taylor));
}

double AnalyticGerm::coefficient(int n) const { return coeff_(n); }

SpectralFunction AnalyticGerm::nonlinearPart(const SpectralModel& model, const SpectralFunction& w,
                                             double tolerance, int maxTerms) const {
  SpectralFunction out = model.zero();
  SpectralFunction power = model.multiply(w, w);
  const int limit = taylor_.empty() ? maxTerms : std::min<int>(maxTerms, int(taylor_.size()) - 1);
  for (int n = 2; n <= limit; ++n) {
    const double g = coefficient(n);
    if (g != 0.0) out += g * power;
    const double size = power.maxAbs();
    if (size * std::max(1.0, std::abs(g)) < tolerance || size == 0.0) break;
    power = model.multiply(power, w);
  }
  return out;
}

PhgSeries composeAnalytic(const AnalyticGerm& germ, const PhgSeries& s) {
  if (germ.coefficient(0) != 0.0 || germ.coefficient(1) != 1.0) {
    throw InputError("phgseries", "analytic germ needs G(0) = 0 and G'(0) = 1");
  }
  if (s.empty()) return s;
  const double e = s.minExponent();
  if (e <= kIndexTolerance) {
    throw InputError("phgseries",
                     "cannot compose an analytic germ with a series that has a constant term");
  }
  if (!std::isfinite(s.truncation())) {
    throw InputError("phgseries", "composition needs a finite truncation order");
  }
  const int maxPower = std::max(1, int(std::floor(s.truncation() / e + 1e-9)));
  auto constant = [&](double v) {
    return PhgSeries::constant(s.modelPtr(), v, s.truncation(), s.indicesPtr());
  };
  // G(s) = s·(g1 + s·(g2 + ... + s·g_max)).
  PhgSeries acc = constant(germ.coefficient(maxPower));
  for (int n = maxPower - 1; n >= 1; --n) acc = add(constant(germ.coefficient(n)), multiply(s, acc));
  return multiply(s, acc);
}

// ---------------------------------------------------------------------------

namespace {

template <typename Scalar>
std::vector<MonomialIntegralTerm<Scalar>> integrateMonomialImpl(Scalar a, int j, bool aIsZero) {
  if (j < 0) throw InputError("phgseries", "log power must be non-negative");
  std::vector<MonomialIntegralTerm<Scalar>> out;
  if (aIsZero) {
    out.push_back({Scalar(0), j + 1, Scalar(1) / Scalar(j + 1)});
    return out;
  }
  // Σ_{m=0}^{j} (−1)^{j−m} (j!/m!) a^{−(j−m+1)} x^a (log x)^m.
  for (int m = j; m >= 0; --m) {
    Scalar c = Scalar(1) / a;
    for (int k = m + 1; k <= j; ++k) c = c * (Scalar(-k) / a);
    out.push_back({a, m, c});
  }
  return out;
}

}  // namespace

std::vector<MonomialIntegralTerm<double>> integrateMonomial(double a, int j) {
  return integrateMonomialImpl<double>(a, j, a == 0.0);
}

std::vector<MonomialIntegralTerm<Rational>> integrateMonomial(Rational a, int j) {
  return integrateMonomialImpl<Rational>(a, j, a.isZero());
}

}  // namespace phg
