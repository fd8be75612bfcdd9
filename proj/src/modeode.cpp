#include "phg/modeode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phg/error.hpp"

namespace phg {

Grid makeGrid(double x0, double xMin, std::size_t count) {
  if (!(x0 > 0.0) || !(xMin > 0.0) || !(xMin < x0)) {
    throw InputError("modeode", "grid needs 0 < xmin < x0");
  }
  if (count < 2) throw InputError("modeode", "grid needs at least two points");
  Grid g{{}, x0, xMin, count};
  g.points.resize(count);
  const double a = std::log(xMin);
  const double b = std::log(x0);
  for (std::size_t k = 0; k < count; ++k) {
    g.points[k] = std::exp(a + (b - a) * double(k) / double(count - 1));
  }
  g.points.front() = xMin;
  g.points.back() = x0;
  return g;
}

void gaussLegendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InputError("modeode", "Gauss-Legendre rule needs at least one node");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    // Newton on P_n from the Chebyshev-like initial guess; nodes ascending.
    double x = -std::cos(std::numbers::pi * (double(k) + 0.75) / (double(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * double(m) - 1.0) * x * p1 - (double(m) - 1.0) * p0) / double(m);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[k] = x;
    weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

// P_0..P_{n} at x.
std::vector<double> legendreValues(std::size_t n, double x) {
  std::vector<double> p(n + 1);
  p[0] = 1.0;
  if (n >= 1) p[1] = x;
  for (std::size_t m = 2; m <= n; ++m) {
    p[m] = ((2.0 * double(m) - 1.0) * x * p[m - 1] - (double(m) - 1.0) * p[m - 2]) / double(m);
  }
  return p;
}

}  // namespace

PanelQuadrature::PanelQuadrature(const Grid& grid, std::size_t nodesPerPanel, double padDecades)
    : grid_(grid), p_(nodesPerPanel) {
  if (grid.points.size() < 2) throw InputError("modeode", "grid needs at least two points");
  if (!(padDecades >= 0.0)) throw InputError("modeode", "padding must be non-negative");
  const double tMin = std::log(grid.points.front());
  const double tMax = std::log(grid.points.back());
  h_ = (tMax - tMin) / double(grid.points.size() - 1);
  pad_ = std::size_t(std::ceil(padDecades * std::log(10.0) / h_));
  const std::size_t panels = pad_ + grid.points.size() - 1;
  boundaries_.resize(panels + 1);
  for (std::size_t b = 0; b <= panels; ++b) {
    boundaries_[b] = tMin + h_ * (double(b) - double(pad_));
  }
  for (std::size_t g = 0; g < grid.points.size(); ++g) boundaries_[pad_ + g] = std::log(grid.points[g]);

  gaussLegendre(p_, tau_, weights_);
  nodes_.reserve(panels * p_);
  for (std::size_t b = 0; b < panels; ++b) {
    const double w = boundaries_[b + 1] - boundaries_[b];
    for (double t : tau_) nodes_.push_back(boundaries_[b] + 0.5 * (t + 1.0) * w);
  }
  // S = Q·V⁻¹ with V[a][n] = P_n(τ_a), Q[a][n] = ∫_{-1}^{τ_a} P_n, and the
  // discrete orthogonality V⁻¹[n][c] = (2n+1)/2·w_c·P_n(τ_c).
  std::vector<std::vector<double>> P(p_);
  for (std::size_t a = 0; a < p_; ++a) P[a] = legendreValues(p_, tau_[a]);
  s_.assign(p_ * p_, 0.0);
  for (std::size_t a = 0; a < p_; ++a) {
    for (std::size_t n = 0; n < p_; ++n) {
      const double q = (n == 0) ? tau_[a] + 1.0 : (P[a][n + 1] - P[a][n - 1]) / (2.0 * double(n) + 1.0);
      for (std::size_t c = 0; c < p_; ++c) {
        s_[a * p_ + c] += q * (2.0 * double(n) + 1.0) / 2.0 * weights_[c] * P[c][n];
      }
    }
  }
}

std::vector<double> PanelQuadrature::nodeX() const {
  std::vector<double> x(nodes_.size());
  std::transform(nodes_.begin(), nodes_.end(), x.begin(), [](double t) { return std::exp(t); });
  return x;
}

namespace {

// ∫_{-∞}^{T0} F(t) e^{q(t−T0)} dt with F extended below the first panel by
// the power law c·e^{pt} fitted to its first-panel nodes.
double lowerTail(std::span<const double> f, const PanelQuadrature& quad, double q, double mUnder) {
  const std::size_t p = quad.nodesPerPanel();
  const double T0 = quad.boundaries().front();
  const double fa = f[0];
  const double fb = f[p - 1];
  const double ta = quad.nodes()[0];
  const double tb = quad.nodes()[p - 1];
  if (fa == 0.0 && fb == 0.0) return 0.0;
  double power = 0.0;
  double c = fa;
  if (p > 1 && fa != 0.0 && fb != 0.0 && (fa > 0.0) == (fb > 0.0)) {
    power = std::log(fb / fa) / (tb - ta);
    c = fa * std::exp(-power * ta);
  } else {
    c = 0.5 * (fa + fb);
  }
  const double a = power + q;  // exponent of x in the integrand x^{a−1}
  if (!(a > 1e-12)) {
    std::ostringstream os;
    os << "forcing grows like x^" << power << " near 0, faster than the integrable limit x^"
       << mUnder << " (outside the problem class)";
    throw NumericalError("modeode", os.str());
  }
  // ∫_0^{x} s^{a−1} ds in closed form, x = e^{T0}, rescaled by e^{−q T0}.
  double tail = 0.0;
  for (const auto& term : integrateMonomial(a, 0)) {
    tail += term.coefficient * std::exp(term.exponent * T0);
  }
  return c * tail * std::exp(-q * T0);
}

}  // namespace

ModeSolution solveModeODE(double lambda, std::span<const double> f, double datum,
                          const PanelQuadrature& quad) {
  if (f.size() != quad.nodeCount()) {
    throw InputError("modeode", "forcing has " + std::to_string(f.size()) + " node values, expected " +
                                    std::to_string(quad.nodeCount()));
  }
  if (!std::isfinite(datum)) throw InputError("modeode", "boundary datum is not finite");
  for (double v : f) {
    if (!std::isfinite(v)) throw NumericalError("modeode", "forcing is not finite on the grid");
  }
  const IndicialRoots roots = characteristicRoots(lambda);
  const double mb = roots.mBar;
  const double q = -roots.mUnder;
  const double twoOverGap = 2.0 / roots.gap();
  const std::size_t p = quad.nodesPerPanel();
  const std::size_t panels = quad.panelCount();
  const auto& T = quad.boundaries();
  const auto& t = quad.nodes();
  const auto& W = quad.referenceWeights();

  std::vector<double> kB(panels + 1), jB(panels + 1);
  std::vector<double> kN(t.size()), jN(t.size());
  std::vector<double> g(p);

  // K(t) = x^{m̲} ∫_0^x F s^{−1−m̲} ds, marched upward.
  kB[0] = lowerTail(f, quad, q, roots.mUnder);
  for (std::size_t b = 0; b < panels; ++b) {
    const double h = T[b + 1] - T[b];
    const std::size_t o = b * p;
    double total = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
      g[a] = f[o + a] * std::exp(q * (t[o + a] - T[b]));
      total += 0.5 * h * W[a] * g[a];
    }
    for (std::size_t a = 0; a < p; ++a) {
      double partial = 0.0;
      for (std::size_t c = 0; c < p; ++c) partial += quad.integrationMatrix(a, c) * g[c];
      kN[o + a] = std::exp(-q * (t[o + a] - T[b])) * (kB[b] + 0.5 * h * partial);
    }
    kB[b + 1] = std::exp(-q * h) * (kB[b] + total);
  }

  // J(t) = x^{m̄} ∫_x^{x₀} F s^{−1−m̄} ds, marched downward.
  jB[panels] = 0.0;
  for (std::size_t b = panels; b-- > 0;) {
    const double h = T[b + 1] - T[b];
    const std::size_t o = b * p;
    double total = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
      g[a] = f[o + a] * std::exp(mb * (T[b + 1] - t[o + a]));
      total += 0.5 * h * W[a] * g[a];
    }
    for (std::size_t a = 0; a < p; ++a) {
      double partial = 0.0;
      for (std::size_t c = 0; c < p; ++c) partial += quad.integrationMatrix(a, c) * g[c];
      jN[o + a] = std::exp(-mb * (T[b + 1] - t[o + a])) * (jB[b + 1] + total - 0.5 * h * partial);
    }
    jB[b] = std::exp(-mb * h) * (jB[b + 1] + total);
  }

  // v = (x/x₀)^{m̄}(v(x₀) + (2/Δ)K(x₀)) − (2/Δ)(J + K).
  const double tEnd = T[panels];
  const double amplitude = datum + twoOverGap * kB[panels];
  auto value = [&](double tt, double j, double k) {
    return std::exp(mb * (tt - tEnd)) * amplitude - twoOverGap * (j + k);
  };

  ModeSolution sol;
  sol.boundaryDatum = datum;
  sol.roots = roots;
  sol.nodeValues.resize(t.size());
  for (std::size_t n = 0; n < t.size(); ++n) sol.nodeValues[n] = value(t[n], jN[n], kN[n]);
  const std::size_t gridCount = quad.grid().points.size();
  sol.values.resize(gridCount);
  for (std::size_t gi = 0; gi < gridCount; ++gi) {
    const std::size_t b = quad.paddingPanels() + gi;
    sol.values[gi] = value(T[b], jB[b], kB[b]);
  }
  sol.values.back() = datum;
  return sol;
}

ModeSolution solveModeODE(double lambda, const std::function<double(double)>& forcing, double datum,
                          const PanelQuadrature& quad) {
  const auto xs = quad.nodeX();
  std::vector<double> f(xs.size());
  std::transform(xs.begin(), xs.end(), f.begin(), forcing);
  return solveModeODE(lambda, std::span<const double>(f), datum, quad);
}

ModeSolution solveModeODE(double lambda, const std::function<double(double)>& forcing, double datum,
                          const Grid& grid) {
  return solveModeODE(lambda, forcing, datum, PanelQuadrature(grid));
}

ThetaAverage averageTheta(const std::function<double(double, double, std::size_t)>& u,
                          const Grid& grid, std::size_t modes, std::size_t samples,
                          double aliasTolerance) {
  if (samples < 1) throw InputError("modeode", "θ-averaging needs at least one sample");
  auto average = [&](std::size_t m, double x, std::size_t mode) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      s += u(2.0 * std::numbers::pi * double(k) / double(m), x, mode);
    }
    return s / double(m);
  };
  ThetaAverage out;
  out.modes.assign(modes, std::vector<double>(grid.points.size()));
  double scale = 0.0;
  for (std::size_t l = 0; l < modes; ++l) {
    for (std::size_t g = 0; g < grid.points.size(); ++g) {
      const double x = grid.points[g];
      const double coarse = average(samples, x, l);
      const double fine = average(2 * samples, x, l);
      out.modes[l][g] = coarse;
      out.aliasDefect = std::max(out.aliasDefect, std::abs(coarse - fine));
      scale = std::max({scale, std::abs(coarse), std::abs(fine)});
    }
  }
  out.aliasDetected = out.aliasDefect > aliasTolerance * std::max(1.0, scale);
  return out;
}

std::vector<double> boundaryDataFrom(const PhgSeries& psi, double x0) {
  return psi.evaluate(x0).vector();
}

PicardResult picardSolve(const ModelProblem& p, const Grid& grid, std::span<const double> boundaryData,
                         const PicardOptions& options) {
  const SpectralModel& model = *p.model;
  const std::size_t L = model.size();
  if (boundaryData.size() != L) {
    throw InputError("modeode", "need one boundary datum per mode (" + std::to_string(L) + ")");
  }
  for (double d : boundaryData) {
    if (!std::isfinite(d)) throw InputError("modeode", "boundary data must be finite");
  }
  if (!(options.tol > 0.0)) throw InputError("modeode", "Picard tolerance must be positive");

  const PanelQuadrature quad(grid, options.nodesPerPanel, options.padDecades);
  const auto xs = quad.nodeX();
  const std::size_t nodes = xs.size();

  // Source and perturbation are fixed across sweeps.
  const PhgSeries forcing = p.forcing();
  std::vector<SpectralFunction> source(nodes), pert;
  for (std::size_t n = 0; n < nodes; ++n) source[n] = forcing.evaluate(xs[n]);
  if (p.operatorPerturbation) {
    pert.resize(nodes);
    for (std::size_t n = 0; n < nodes; ++n) pert[n] = p.operatorPerturbation->evaluate(xs[n]);
  }

  std::vector<SpectralFunction> v(nodes, model.zero()), lv(nodes, model.zero()), ntv(nodes, model.zero());
  std::vector<std::vector<double>> rhs(L, std::vector<double>(nodes));
  PicardResult result;
  for (std::size_t iter = 1; iter <= options.maxIter; ++iter) {
    for (std::size_t n = 0; n < nodes; ++n) {
      SpectralFunction F = source[n] - p.nonlinearity.nonlinearPart(model, lv[n]);
      if (!pert.empty()) F -= model.multiply(pert[n], ntv[n]);
      for (std::size_t l = 0; l < L; ++l) rhs[l][n] = F[l];
    }
    std::vector<ModeSolution> modes(L);
    for (std::size_t l = 0; l < L; ++l) {
      modes[l] = solveModeODE(model.eigenvalue(l), std::span<const double>(rhs[l]), boundaryData[l], quad);
      modes[l].modeIndex = l;
    }
    double change = 0.0;
    double peak = 0.0;
    for (std::size_t n = 0; n < nodes; ++n) {
      SpectralFunction next(L);
      for (std::size_t l = 0; l < L; ++l) {
        next[l] = modes[l].nodeValues[n];
        change = std::max(change, std::abs(next[l] - v[n][l]));
        peak = std::max(peak, std::abs(next[l]));
      }
      // Ñv = Nv + v = F + (1 + λ)v on the new iterate, without differentiation.
      SpectralFunction nt(L);
      for (std::size_t l = 0; l < L; ++l) nt[l] = rhs[l][n] + (1.0 + model.eigenvalue(l)) * next[l];
      SpectralFunction lvNext = model.applyLaplacian(next) + nt;
      if (!pert.empty()) lvNext += model.multiply(pert[n], nt);
      v[n] = std::move(next);
      ntv[n] = std::move(nt);
      lv[n] = std::move(lvNext);
    }
    if (!std::isfinite(peak) || peak > options.overflowGuard) {
      std::ostringstream os;
      os << "Picard iterate blew up (sup norm " << peak << ") at iteration " << iter;
      throw NumericalError("modeode", os.str());
    }
    result.changeHistory.push_back(change);
    result.modes = std::move(modes);
    result.iterations = iter;
    result.finalChange = change;
    if (change < options.tol) return result;
  }
  std::ostringstream os;
  os << "Picard iteration did not converge in " << options.maxIter << " iterations (final defect "
     << result.finalChange << ")";
  throw NumericalError("modeode", os.str());
}

}  // namespace phg
