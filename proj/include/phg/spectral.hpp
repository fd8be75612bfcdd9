#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace phg {

// Coefficients of a function on the divisor D in the eigenbasis φ_0..φ_{L-1}
// of -Δ_D. Component 0 multiplies the constant eigenfunction.
class SpectralFunction {
 public:
  SpectralFunction() = default;
  explicit SpectralFunction(std::size_t size) : c_(size, 0.0) {}
  explicit SpectralFunction(std::vector<double> coefficients) : c_(std::move(coefficients)) {}
  SpectralFunction(std::initializer_list<double> coefficients) : c_(coefficients) {}

  static SpectralFunction unit(std::size_t size, std::size_t mode, double value = 1.0) {
    SpectralFunction f(size);
    f.c_.at(mode) = value;
    return f;
  }

  std::size_t size() const noexcept { return c_.size(); }
  double operator[](std::size_t l) const { return c_[l]; }
  double& operator[](std::size_t l) { return c_[l]; }
  std::span<const double> coefficients() const noexcept { return c_; }
  const std::vector<double>& vector() const noexcept { return c_; }

  bool isZero() const noexcept;
  bool isFinite() const noexcept;
  double norm() const noexcept;     // Euclidean = L² norm on D
  double maxAbs() const noexcept;

  SpectralFunction& operator+=(const SpectralFunction& other);
  SpectralFunction& operator-=(const SpectralFunction& other);
  SpectralFunction& operator*=(double s);

  friend SpectralFunction operator+(SpectralFunction a, const SpectralFunction& b) { return a += b; }
  friend SpectralFunction operator-(SpectralFunction a, const SpectralFunction& b) { return a -= b; }
  friend SpectralFunction operator*(double s, SpectralFunction a) { return a *= s; }
  friend SpectralFunction operator*(SpectralFunction a, double s) { return a *= s; }
  friend SpectralFunction operator-(SpectralFunction a) { return a *= -1.0; }
  friend bool operator==(const SpectralFunction&, const SpectralFunction&) = default;

 private:
  std::vector<double> c_;
};

struct EigenspaceDecomposition {
  double eigenvalue = 0.0;
  std::vector<std::size_t> kernelIndices;
};

// |λ_l - μ| ≤ kKernelTolerance·max(1, |μ|) counts as "λ_l = μ".
inline constexpr double kKernelTolerance = 1e-9;

enum class ModelKind { Point, Circle, Torus, Dense };

// One nonzero structure constant ∫_D φ_i φ_j φ_k dv_D.
struct TripleEntry {
  std::size_t i, j, k;
  double value;
};

// Finite spectral stand-in for (D, ω_D): eigenvalues of -Δ_D, volume and the
// triple-product tensor that encodes pointwise multiplication. Immutable.
class SpectralModel {
 public:
  static SpectralModel point();
  // Fourier basis 1, cos θ, sin θ, cos 2θ, ... truncated to `modes` entries,
  // on a circle of metric radius `radius` (λ = k²/radius²).
  static SpectralModel circle(std::size_t modes, double radius = 1.0);
  // Real Fourier basis on the square flat torus (R/2πZ)^{2n-2}, keeping all
  // lattice frequencies with |ξ|² ≤ latticeCutoff.
  static SpectralModel torus(int n, int latticeCutoff);
  // User-supplied model; `dense` is row-major T[i][j][k] of size L³.
  static SpectralModel dense(int dimD, std::vector<double> eigenvalues, double volume,
                             std::span<const double> tensor);

  ModelKind kind() const noexcept { return kind_; }
  std::string describe() const;
  int dimD() const noexcept { return dimD_; }
  std::size_t size() const noexcept { return eigenvalues_.size(); }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  double eigenvalue(std::size_t l) const { return eigenvalues_.at(l); }
  double volume() const noexcept { return volume_; }
  const std::vector<TripleEntry>& tripleEntries() const noexcept { return entries_; }
  double triple(std::size_t i, std::size_t j, std::size_t k) const;

  SpectralFunction zero() const { return SpectralFunction(size()); }
  // The constant function with value `value` everywhere on D.
  SpectralFunction constant(double value) const;
  // ⨍_D w dv_D.
  double mean(const SpectralFunction& w) const;

  SpectralFunction multiply(const SpectralFunction& a, const SpectralFunction& b) const;
  SpectralFunction applyLaplacian(const SpectralFunction& w) const;

  EigenspaceDecomposition eigenspace(double lambda) const;
  // (d⁰, d^⊥) with d⁰ supported on the eigenspace of λ.
  std::pair<SpectralFunction, SpectralFunction> projectOntoEigenspace(const SpectralFunction& d,
                                                                      double lambda) const;
  // Solves (Δ_D + μ)c = d choosing the kernel component of c to be zero.
  // Throws SolvabilityViolation if d has a kernel component above
  // `kernelTolerance`·max(1, ‖d‖).
  SpectralFunction solveShiftedPoisson(const SpectralFunction& d, double mu,
                                       double kernelTolerance = 1e-10) const;

  // Pointwise evaluation of φ_l; only for the built-in trigonometric models.
  // `point` has dimD coordinates (angles in [0, 2π)).
  double evaluateBasis(std::size_t l, std::span<const double> point) const;
  // L² projection of a function sampled on D through the trapezoid rule with
  // `samplesPerAxis` points per angle. Built-in models only.
  SpectralFunction projectSamples(const std::function<double(std::span<const double>)>& w,
                                  std::size_t samplesPerAxis) const;

  void checkCompatible(const SpectralFunction& w) const;
  bool sameAs(const SpectralModel& other) const noexcept;

 private:
  // Each basis function of a Fourier model as a sum of complex exponentials
  // with integer frequency vectors.
  struct FourierTerm {
    std::vector<int> frequency;
    double re, im;
  };
  static SpectralModel fromFourier(ModelKind kind, int dimD, double radius,
                                   std::vector<std::vector<FourierTerm>> basis,
                                   std::vector<double> eigenvalues);
  void indexEntries();

  ModelKind kind_ = ModelKind::Point;
  int dimD_ = 0;
  double radius_ = 1.0;
  double volume_ = 1.0;
  std::vector<double> eigenvalues_;
  std::vector<TripleEntry> entries_;                  // all ordered (i, j, k)
  std::vector<std::vector<std::size_t>> byFirst_;     // entry indices grouped by i
  std::vector<std::vector<FourierTerm>> fourier_;     // empty for Dense models
};

}  // namespace phg
