#include "phg/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phg/error.hpp"

namespace phg {

SlopeFit fitLogLogSlope(std::span<const double> x, std::span<const double> y, int maxLogPower) {
  if (x.size() != y.size()) throw InputError("fit", "x and y have different lengths");
  std::vector<double> lx, ly, lll;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (!(x[n] > 0.0) || !(x[n] < 1.0) || !(std::abs(y[n]) > 0.0) || !std::isfinite(y[n])) continue;
    lx.push_back(std::log(x[n]));
    ly.push_back(std::log(std::abs(y[n])));
    lll.push_back(std::log(std::abs(std::log(x[n]))));
  }
  if (lx.size() < 3) throw NumericalError("fit", "too few usable points for a slope fit");
  SlopeFit best;
  best.rms = std::numeric_limits<double>::infinity();
  const double n = double(lx.size());
  for (int j = 0; j <= std::max(0, maxLogPower); ++j) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      const double yy = ly[k] - j * lll[k];
      sx += lx[k];
      sy += yy;
      sxx += lx[k] * lx[k];
      sxy += lx[k] * yy;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double ss = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      const double r = ly[k] - j * lll[k] - slope * lx[k] - intercept;
      ss += r * r;
    }
    const double rms = std::sqrt(ss / n);
    if (rms < best.rms) best = {slope, intercept, j, rms, lx.size()};
  }
  return best;
}

MonomialFit fitMonomials(std::span<const double> x, std::span<const double> y,
                         const std::vector<LogMonomial>& basis, double weightExponent) {
  if (x.size() != y.size()) throw InputError("fit", "x and y have different lengths");
  if (basis.empty()) throw InputError("fit", "empty regression basis");
  if (x.size() < basis.size()) throw NumericalError("fit", "fewer points than regression columns");
  const Eigen::Index rows = Eigen::Index(x.size());
  const Eigen::Index cols = Eigen::Index(basis.size());
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double lx = std::log(x[r]);
    const double w = std::pow(x[r], -weightExponent);
    for (Eigen::Index c = 0; c < cols; ++c) {
      A(r, c) = w * std::pow(x[r], basis[c].exponent) * std::pow(lx, basis[c].logPower);
    }
    b(r) = w * y[r];
  }
  Eigen::VectorXd colScale = A.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (colScale(c) == 0.0) colScale(c) = 1.0;
    A.col(c) /= colScale(c);
  }
  const Eigen::VectorXd z = A.colPivHouseholderQr().solve(b);
  MonomialFit fit;
  fit.basis = basis;
  fit.coefficients.resize(basis.size());
  for (Eigen::Index c = 0; c < cols; ++c) fit.coefficients[c] = z(c) / colScale(c);
  fit.residualRms = std::sqrt((A * z - b).squaredNorm() / double(rows));
  return fit;
}

std::vector<std::size_t> fitWindow(const Grid& grid, double lo, double hi) {
  std::vector<std::size_t> idx;
  for (std::size_t g = 0; g < grid.points.size(); ++g) {
    if (grid.points[g] >= lo * (1 - 1e-12) && grid.points[g] <= hi * (1 + 1e-12)) idx.push_back(g);
  }
  if (idx.size() < 16) {
    std::ostringstream os;
    os << "fit window [" << lo << ", " << hi << "] holds " << idx.size()
       << " grid points; at least 16 are needed";
    throw InputError("fit", os.str());
  }
  return idx;
}

double fitOrderFor(const IndexSet& I, double order, double extra) {
  double best = order;
  for (double e : I.elements()) {
    if (e <= order + extra + kIndexTolerance && I.hasNext(e)) best = std::max(best, e);
  }
  return best;
}

namespace {

struct WindowData {
  std::vector<double> x;
  std::vector<std::vector<double>> v;  // [mode][window point]
};

WindowData windowData(const std::vector<ModeSolution>& sol, const Grid& grid,
                      const std::vector<std::size_t>& idx) {
  WindowData w;
  for (std::size_t g : idx) w.x.push_back(grid.points[g]);
  w.v.assign(sol.size(), {});
  for (std::size_t l = 0; l < sol.size(); ++l) {
    if (sol[l].values.size() != grid.points.size()) {
      throw InputError("fit", "mode solution does not live on the given grid");
    }
    for (std::size_t g : idx) w.v[l].push_back(sol[l].values[g]);
  }
  return w;
}

// ψ on the window, [mode][point].
std::vector<std::vector<double>> evaluateOn(const PhgSeries& psi, const std::vector<double>& xs) {
  std::vector<std::vector<double>> out(psi.model().size(), std::vector<double>(xs.size()));
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const auto value = psi.evaluate(xs[n]);
    for (std::size_t l = 0; l < value.size(); ++l) out[l][n] = value[l];
  }
  return out;
}

int maxLogPower(const PhgSeries& psi) {
  int m = 0;
  for (const auto& t : psi.terms()) m = std::max(m, t.monomial.logPower);
  return m;
}

// Basis {x^e (log x)^j : e ∈ I, lo < e ≤ hi, j ≤ J(e)} with J(e) the largest
// log power ψ carries at e (any mode), plus one at resonant indices.
std::vector<LogMonomial> monoidBasis(const IndexSet& I, const PhgSeries& psi, double lo, double hi,
                                     int fallbackLog) {
  std::vector<LogMonomial> basis;
  for (double e : I.elements()) {
    if (e <= lo + kIndexTolerance || e > hi + kIndexTolerance) continue;
    int j = psi.maxLogPower(e);
    if (j < 0) j = fallbackLog;
    if (I.isResonant(e)) j += 1;
    for (int q = j; q >= 0; --q) basis.push_back({e, q});
  }
  return basis;
}

// Terms of ψ above `order`, subtracted from the data as a known tail.
PhgSeries tailAbove(const PhgSeries& psi, double order) {
  PhgSeries tail(psi.modelPtr(), psi.truncation(), psi.indicesPtr());
  for (const auto& t : psi.terms()) {
    if (t.monomial.exponent > order + kIndexTolerance) tail = tail.withTerm(t.monomial, t.coeff);
  }
  return tail;
}

// Columns at the first index beyond ψ_K, for whatever the tail misses.
void addGuardColumns(std::vector<LogMonomial>& basis, const IndexSet& I, const PhgSeries& psiK,
                     double fitOrder) {
  const double top = I.hasNext(fitOrder) ? I.nextIndex(fitOrder) : fitOrder;
  if (top <= fitOrder + kIndexTolerance) return;
  const int jTop = std::max(0, psiK.maxLogPower(fitOrder)) + 1;
  for (int j = jTop; j >= 0; --j) basis.push_back({top, j});
}

}  // namespace

std::vector<FreeComponent> extractFreeComponents(const std::vector<ModeSolution>& v, const Grid& grid,
                                                 const ModelProblem& p, double fitOrder,
                                                 const FitOptions& options) {
  const IndexSet& I = *p.indexSet;
  const double lo = grid.xMin * options.windowLoFactor;
  const double hi = grid.x0 * options.windowHiFactor;
  // Lower half (in log x) of the fit window: terms beyond ψ_K are negligible there.
  const auto idx = fitWindow(grid, lo, std::max(std::sqrt(lo * hi), lo * 100.0));
  const WindowData w = windowData(v, grid, idx);

  std::vector<FreeComponent> free;
  for (double e : I.elements()) {
    if (e <= kIndexTolerance || e > fitOrder + kIndexTolerance) continue;
    for (std::size_t l : I.resonantModesAt(e)) free.push_back({e, l, 0.0});
  }
  if (free.empty()) return free;

  double previousChange = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < options.freeIterations; ++it) {
    FormalOptions fo;
    fo.prescribed = free;
    const FormalSolution formal = formalExpansion(p, fitOrder, fo);
    const auto psiValues = evaluateOn(formal.psi, w.x);
    const int fallback = maxLogPower(formal.psi);
    double change = 0.0;
    double scale = 1e-300;
    std::vector<double> updates(free.size());
    for (std::size_t s = 0; s < free.size(); ++s) {
      const auto& slot = free[s];
      std::vector<double> d(w.x.size());
      for (std::size_t n = 0; n < d.size(); ++n) d[n] = w.v[slot.mode][n] - psiValues[slot.mode][n];
      // d = δ·x^e plus terms δ induces one order up; the iteration removes the rest.
      auto basis = monoidBasis(I, formal.psi, slot.exponent - 2 * kIndexTolerance, slot.exponent + 1.0,
                               fallback);
      const MonomialFit fit = fitMonomials(w.x, d, basis, slot.exponent);
      for (std::size_t b = 0; b < basis.size(); ++b) {
        if (sameMonomial(basis[b], {slot.exponent, 0})) updates[s] = fit.coefficients[b];
      }
      change = std::max(change, std::abs(updates[s]));
      scale = std::max(scale, std::abs(slot.value));
    }
    for (std::size_t s = 0; s < free.size(); ++s) free[s].value += updates[s];
    if (change <= 1e-15 * std::max(scale, p.scale()) || change >= previousChange) break;
    previousChange = change;
  }
  return free;
}

ExpansionReport fitRemainder(const std::vector<ModeSolution>& v, const Grid& grid, const ModelProblem& p,
                             double order, const FitOptions& options) {
  const IndexSet& I = *p.indexSet;
  if (v.size() != p.model->size()) throw InputError("fit", "need one mode solution per eigenmode");
  const double windowLo = grid.xMin * options.windowLoFactor;
  const double windowHi = grid.x0 * options.windowHiFactor;
  const auto idx = fitWindow(grid, windowLo, windowHi);
  const WindowData w = windowData(v, grid, idx);

  const double fitOrder = fitOrderFor(I, order, options.extraOrder);
  auto free = extractFreeComponents(v, grid, p, fitOrder, options);

  FormalOptions fo;
  fo.prescribed = free;
  const FormalSolution formalK = formalExpansion(p, fitOrder, fo);
  FormalOptions foOrder;
  for (const auto& fc : free) {
    if (fc.exponent <= order + kIndexTolerance) foOrder.prescribed.push_back(fc);
  }
  ExpansionReport report{formalExpansion(p, order, foOrder), std::move(free), {}, {}, order,
                         windowLo, windowHi};

  // Remainder orders |ṽ − ψ_k| ~ x^{k₊}.
  const int logScan = std::max(1, maxLogPower(formalK.psi));
  for (double k : I.elements()) {
    if (k > order + kIndexTolerance || !I.hasNext(k)) continue;
    const PhgSeries psiK = formalK.psi.partialSum(k);
    const auto psiValues = evaluateOn(psiK, w.x);
    std::vector<double> xs, rs;
    for (std::size_t n = 0; n < w.x.size(); ++n) {
      double r2 = 0.0, v2 = 0.0;
      for (std::size_t l = 0; l < v.size(); ++l) {
        const double r = w.v[l][n] - psiValues[l][n];
        r2 += r * r;
        v2 += w.v[l][n] * w.v[l][n];
      }
      // Drop points where the remainder is at the rounding level of ṽ.
      if (std::sqrt(r2) > 1e3 * std::numeric_limits<double>::epsilon() * std::sqrt(v2)) {
        xs.push_back(w.x[n]);
        rs.push_back(std::sqrt(r2));
      }
    }
    RemainderSlope rsl;
    rsl.k = k;
    rsl.expected = I.nextIndex(k);
    if (xs.size() >= 16) {
      const SlopeFit f = fitLogLogSlope(xs, rs, logScan);
      rsl.slope = f.slope;
      rsl.logPower = f.logPower;
      rsl.points = f.points;
      rsl.pass = std::abs(f.slope - rsl.expected) <= options.slopeTolerance;
      rsl.bounded = f.slope >= rsl.expected - options.slopeTolerance;
    } else {
      rsl.points = xs.size();
    }
    report.remainderSlopes.push_back(rsl);
  }

  // Direct regression of each mode on the monomials up to `order`; only the
  // formal terms above `order` are subtracted, as a known tail.
  const double floor = options.relativeFloor * std::max(p.scale(), formalK.psi.coefficientScale());
  const auto tailValues = evaluateOn(tailAbove(formalK.psi, order), w.x);
  for (std::size_t l = 0; l < v.size(); ++l) {
    std::vector<LogMonomial> basis;
    for (const auto& t : formalK.psi.terms()) {
      if (t.coeff[l] != 0.0 && t.monomial.exponent <= order + kIndexTolerance) basis.push_back(t.monomial);
    }
    for (const auto& fc : report.fittedFreeComponents) {
      if (fc.mode == l && fc.exponent <= order + kIndexTolerance &&
          std::none_of(basis.begin(), basis.end(),
                       [&](const LogMonomial& m) { return sameMonomial(m, {fc.exponent, 0}); })) {
        basis.push_back({fc.exponent, 0});
      }
    }
    if (basis.empty()) continue;
    addGuardColumns(basis, I, formalK.psi, fitOrder);
    std::sort(basis.begin(), basis.end(), precedes);
    std::vector<double> y(w.x.size());
    for (std::size_t n = 0; n < y.size(); ++n) y[n] = w.v[l][n] - tailValues[l][n];
    const MonomialFit fit = fitMonomials(w.x, y, basis, basis.front().exponent);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const auto& m = basis[b];
      if (m.exponent > order + kIndexTolerance) continue;
      CoefficientComparison c;
      c.exponent = m.exponent;
      c.logPower = m.logPower;
      c.mode = l;
      c.formal = formalK.psi.coefficient(m.exponent, m.logPower)[l];
      c.oracle = fit.coefficients[b];
      c.discrepancy = std::abs(c.formal - c.oracle);
      c.relative = c.discrepancy / std::max(std::abs(c.formal), floor);
      const auto modes = I.resonantModesAt(m.exponent);
      c.free = m.logPower == 0 && std::find(modes.begin(), modes.end(), l) != modes.end();
      report.discrepancies.push_back(c);
    }
  }
  return report;
}

std::vector<LogProbe> probeLogTerms(const std::vector<ModeSolution>& v, const Grid& grid,
                                    const ModelProblem& p, const ExpansionReport& report,
                                    const FitOptions& options) {
  const IndexSet& I = *p.indexSet;
  const double order = report.order;
  const auto idx = fitWindow(grid, report.windowLo, report.windowHi);
  const WindowData w = windowData(v, grid, idx);
  const double fitOrder = fitOrderFor(I, order, options.extraOrder);
  FormalOptions fo;
  fo.prescribed = report.fittedFreeComponents;
  const PhgSeries psiK = formalExpansion(p, fitOrder, fo).psi;
  const auto tailValues = evaluateOn(tailAbove(psiK, order), w.x);

  std::vector<LogProbe> out;
  for (std::size_t l = 0; l < v.size(); ++l) {
    std::vector<LogMonomial> basis;
    std::vector<LogMonomial> probes;
    for (double e : I.elements()) {
      if (e <= kIndexTolerance || e > order + kIndexTolerance) continue;
      int top = -1;
      for (const auto& t : psiK.terms()) {
        if (std::abs(t.monomial.exponent - e) <= kIndexTolerance && t.coeff[l] != 0.0) {
          top = std::max(top, t.monomial.logPower);
        }
      }
      for (int j = 0; j <= std::max(top, 0); ++j) basis.push_back({e, j});
      probes.push_back({e, std::max(top, 0) + 1});
      basis.push_back(probes.back());
    }
    if (basis.empty()) continue;
    addGuardColumns(basis, I, psiK, fitOrder);
    std::sort(basis.begin(), basis.end(), precedes);
    std::vector<double> y(w.x.size());
    for (std::size_t n = 0; n < y.size(); ++n) y[n] = w.v[l][n] - tailValues[l][n];
    const MonomialFit fit = fitMonomials(w.x, y, basis, basis.front().exponent);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      for (const auto& m : probes) {
        if (sameMonomial(m, basis[b])) out.push_back({m.exponent, m.logPower, l, fit.coefficients[b]});
      }
    }
  }
  return out;
}

}  // namespace phg
