#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "phg/formal.hpp"
#include "phg/indices.hpp"

namespace phg {

// Geometric grid on [xMin, x0]; points.front() == xMin, points.back() == x0.
struct Grid {
  std::vector<double> points;
  double x0 = 0.1;
  double xMin = 1e-6;
  std::size_t count = 512;
};

Grid makeGrid(double x0 = 0.1, double xMin = 1e-6, std::size_t count = 512);

// Composite Gauss-Legendre rule in t = log x on the panels between grid
// points, extended by `padDecades` of identical panels below xMin. Node
// values are what the mode solver consumes; grid values are what it reports.
class PanelQuadrature {
 public:
  PanelQuadrature(const Grid& grid, std::size_t nodesPerPanel = 8, double padDecades = 4.0);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t nodesPerPanel() const noexcept { return p_; }
  std::size_t panelCount() const noexcept { return boundaries_.size() - 1; }
  std::size_t paddingPanels() const noexcept { return pad_; }
  double panelWidth() const noexcept { return h_; }
  // log x at panel boundaries (padding first) and at nodes (panel-major).
  const std::vector<double>& boundaries() const noexcept { return boundaries_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  std::size_t nodeCount() const noexcept { return nodes_.size(); }
  std::vector<double> nodeX() const;
  // Reference rule on [-1, 1] and the indefinite-integration matrix
  // S[a][c] = ∫_{-1}^{τ_a} ℓ_c(τ) dτ.
  const std::vector<double>& referenceNodes() const noexcept { return tau_; }
  const std::vector<double>& referenceWeights() const noexcept { return weights_; }
  double integrationMatrix(std::size_t a, std::size_t c) const { return s_[a * p_ + c]; }

 private:
  Grid grid_;
  std::size_t p_;
  std::size_t pad_;
  double h_;
  std::vector<double> boundaries_;
  std::vector<double> nodes_;
  std::vector<double> tau_, weights_, s_;
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gaussLegendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

struct ModeSolution {
  std::size_t modeIndex = 0;
  std::vector<double> values;  // on Grid points
  double boundaryDatum = 0.0;
  IndicialRoots roots;
  std::vector<double> nodeValues;  // on the quadrature nodes
};

// Bounded solution of −λv + Nv = F with v(x₀) = datum, from the
// variation-of-parameters formula with the x^{m̲} branch removed.
// `forcingAtNodes` holds F on quadrature.nodes().
ModeSolution solveModeODE(double lambda, std::span<const double> forcingAtNodes, double datum,
                          const PanelQuadrature& quadrature);
ModeSolution solveModeODE(double lambda, const std::function<double(double)>& forcing, double datum,
                          const PanelQuadrature& quadrature);
ModeSolution solveModeODE(double lambda, const std::function<double(double)>& forcing, double datum,
                          const Grid& grid);

struct ThetaAverage {
  std::vector<std::vector<double>> modes;  // [mode][grid point]
  bool aliasDetected = false;
  double aliasDefect = 0.0;
};

// Trapezoid average over θ ∈ [0, 2π) with `samples` points; aliasing is
// flagged when doubling the sample count changes the average.
ThetaAverage averageTheta(const std::function<double(double theta, double x, std::size_t mode)>& u,
                          const Grid& grid, std::size_t modes, std::size_t samples,
                          double aliasTolerance = 1e-12);

struct PicardOptions {
  double tol = 1e-10;
  std::size_t maxIter = 200;
  double overflowGuard = 1e6;
  std::size_t nodesPerPanel = 8;
  double padDecades = 4.0;
};

struct PicardResult {
  std::vector<ModeSolution> modes;
  std::size_t iterations = 0;
  double finalChange = 0.0;
  std::vector<double> changeHistory;
};

// Fixed-point iteration v ← S(F(v)) where S solves the mode ODEs and
// F(v) = (f + c₀) − [G(Lv) − Lv] − p·Ñv.
PicardResult picardSolve(const ModelProblem& p, const Grid& grid, std::span<const double> boundaryData,
                         const PicardOptions& options = {});

// Boundary data at x₀ from a formal partial sum.
std::vector<double> boundaryDataFrom(const PhgSeries& psi, double x0);

}  // namespace phg
