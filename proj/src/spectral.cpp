#include "phg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>

#include "phg/error.hpp"

namespace phg {

bool SpectralFunction::isZero() const noexcept {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
}

bool SpectralFunction::isFinite() const noexcept {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return std::isfinite(v); });
}

double SpectralFunction::norm() const noexcept {
  double s = 0.0;
  for (double v : c_) s += v * v;
  return std::sqrt(s);
}

double SpectralFunction::maxAbs() const noexcept {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

SpectralFunction& SpectralFunction::operator+=(const SpectralFunction& other) {
  if (other.size() != size()) {
    throw InputError("spectral", "spectral dimension mismatch in addition");
  }
  for (std::size_t l = 0; l < c_.size(); ++l) c_[l] += other.c_[l];
  return *this;
}

SpectralFunction& SpectralFunction::operator-=(const SpectralFunction& other) {
  if (other.size() != size()) {
    throw InputError("spectral", "spectral dimension mismatch in subtraction");
  }
  for (std::size_t l = 0; l < c_.size(); ++l) c_[l] -= other.c_[l];
  return *this;
}

SpectralFunction& SpectralFunction::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

// ---------------------------------------------------------------------------

SpectralModel SpectralModel::point() {
  SpectralModel m;
  m.kind_ = ModelKind::Point;
  m.dimD_ = 0;
  m.volume_ = 1.0;
  m.eigenvalues_ = {0.0};
  m.entries_ = {{0, 0, 0, 1.0}};
  m.fourier_ = {{{{}, 1.0, 0.0}}};
  m.indexEntries();
  return m;
}

SpectralModel SpectralModel::circle(std::size_t modes, double radius) {
  if (modes < 1) throw InputError("spectral", "circle model needs at least one mode");
  if (!(radius > 0.0)) throw InputError("spectral", "circle radius must be positive");
  const double volume = 2.0 * std::numbers::pi * radius;
  const double a = std::sqrt(2.0 / volume);
  std::vector<std::vector<FourierTerm>> basis;
  std::vector<double> eigenvalues;
  basis.push_back({{{0}, 1.0 / std::sqrt(volume), 0.0}});
  eigenvalues.push_back(0.0);
  for (int k = 1; basis.size() < modes; ++k) {
    const double lambda = double(k) * double(k) / (radius * radius);
    basis.push_back({{{k}, a / 2, 0.0}, {{-k}, a / 2, 0.0}});
    eigenvalues.push_back(lambda);
    if (basis.size() == modes) break;
    basis.push_back({{{k}, 0.0, -a / 2}, {{-k}, 0.0, a / 2}});
    eigenvalues.push_back(lambda);
  }
  return fromFourier(ModelKind::Circle, 1, radius, std::move(basis), std::move(eigenvalues));
}

SpectralModel SpectralModel::torus(int n, int latticeCutoff) {
  if (n < 1) throw InputError("spectral", "torus model needs n >= 1");
  if (latticeCutoff < 1) throw InputError("spectral", "torus lattice cutoff must be >= 1");
  const int d = 2 * n - 2;
  if (d == 0) return point();
  const int r = int(std::floor(std::sqrt(double(latticeCutoff))));

  // Half-lattice representatives: first nonzero component positive.
  std::vector<std::vector<int>> half;
  std::vector<int> xi(d, -r);
  while (true) {
    int norm2 = 0;
    for (int c : xi) norm2 += c * c;
    const auto firstNonzero = std::find_if(xi.begin(), xi.end(), [](int c) { return c != 0; });
    if (norm2 <= latticeCutoff && firstNonzero != xi.end() && *firstNonzero > 0) half.push_back(xi);
    int axis = d - 1;
    while (axis >= 0 && xi[axis] == r) xi[axis--] = -r;
    if (axis < 0) break;
    ++xi[axis];
  }
  auto norm2 = [](const std::vector<int>& v) {
    int s = 0;
    for (int c : v) s += c * c;
    return s;
  };
  std::stable_sort(half.begin(), half.end(), [&](const auto& p, const auto& q) {
    return norm2(p) != norm2(q) ? norm2(p) < norm2(q) : p < q;
  });

  const double volume = std::pow(2.0 * std::numbers::pi, d);
  const double a = std::sqrt(2.0 / volume);
  std::vector<std::vector<FourierTerm>> basis;
  std::vector<double> eigenvalues;
  basis.push_back({{std::vector<int>(d, 0), 1.0 / std::sqrt(volume), 0.0}});
  eigenvalues.push_back(0.0);
  for (const auto& v : half) {
    std::vector<int> neg(v);
    for (int& c : neg) c = -c;
    basis.push_back({{v, a / 2, 0.0}, {neg, a / 2, 0.0}});
    basis.push_back({{v, 0.0, -a / 2}, {neg, 0.0, a / 2}});
    eigenvalues.push_back(norm2(v));
    eigenvalues.push_back(norm2(v));
  }
  return fromFourier(ModelKind::Torus, d, 1.0, std::move(basis), std::move(eigenvalues));
}

SpectralModel SpectralModel::fromFourier(ModelKind kind, int dimD, double radius,
                                         std::vector<std::vector<FourierTerm>> basis,
                                         std::vector<double> eigenvalues) {
  SpectralModel m;
  m.kind_ = kind;
  m.dimD_ = dimD;
  m.radius_ = radius;
  m.volume_ = std::pow(2.0 * std::numbers::pi * radius, dimD);
  m.eigenvalues_ = std::move(eigenvalues);

  std::map<std::vector<int>, std::vector<std::pair<std::size_t, std::complex<double>>>> byFrequency;
  for (std::size_t c = 0; c < basis.size(); ++c) {
    for (const auto& t : basis[c]) byFrequency[t.frequency].emplace_back(c, std::complex{t.re, t.im});
  }
  // ∫ e^{i(ξ1+ξ2+ξ3)·θ} dv = volume·δ(ξ1+ξ2+ξ3).
  const double floor = 1e-15 / std::sqrt(m.volume_);
  std::vector<int> target(dimD);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      std::map<std::size_t, std::complex<double>> acc;
      for (const auto& ti : basis[i]) {
        for (const auto& tj : basis[j]) {
          for (int q = 0; q < dimD; ++q) target[q] = -(ti.frequency[q] + tj.frequency[q]);
          const auto it = byFrequency.find(target);
          if (it == byFrequency.end()) continue;
          for (const auto& [k, coeff] : it->second) {
            acc[k] += std::complex{ti.re, ti.im} * std::complex{tj.re, tj.im} * coeff * m.volume_;
          }
        }
      }
      for (const auto& [k, value] : acc) {
        if (std::abs(value.real()) > floor) m.entries_.push_back({i, j, k, value.real()});
      }
    }
  }
  m.fourier_ = std::move(basis);
  m.indexEntries();
  return m;
}

SpectralModel SpectralModel::dense(int dimD, std::vector<double> eigenvalues, double volume,
                                   std::span<const double> tensor) {
  const std::size_t L = eigenvalues.size();
  if (L == 0) throw InputError("spectral", "model needs at least one eigenvalue");
  if (dimD < 0) throw InputError("spectral", "dimD must be non-negative");
  if (!(volume > 0.0)) throw InputError("spectral", "volume must be positive");
  if (eigenvalues[0] != 0.0) throw InputError("spectral", "first eigenvalue must be 0");
  for (std::size_t l = 1; l < L; ++l) {
    if (!std::isfinite(eigenvalues[l]) || eigenvalues[l] < eigenvalues[l - 1]) {
      throw InputError("spectral", "eigenvalues must be finite and nondecreasing");
    }
  }
  if (tensor.size() != L * L * L) {
    throw InputError("spectral", "dense triple product needs L^3 = " + std::to_string(L * L * L) +
                                     " entries, got " + std::to_string(tensor.size()));
  }
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return tensor[(i * L + j) * L + k]; };
  double scale = 0.0;
  for (double v : tensor) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * std::max(1.0, scale);
  const double phi0 = 1.0 / std::sqrt(volume);
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      for (std::size_t k = 0; k < L; ++k) {
        const double v = at(i, j, k);
        if (!std::isfinite(v)) throw InputError("spectral", "triple product has non-finite entries");
        if (std::abs(v - at(j, i, k)) > tol || std::abs(v - at(i, k, j)) > tol) {
          throw InputError("spectral", "triple product is not fully symmetric");
        }
      }
      const double expected = (i == j) ? phi0 : 0.0;
      if (std::abs(at(0, i, j) - expected) > tol) {
        throw InputError("spectral", "T[0][j][k] must equal volume^{-1/2}·δ_jk");
      }
    }
  }
  SpectralModel m;
  m.kind_ = (dimD == 0 && L == 1) ? ModelKind::Point : ModelKind::Dense;
  m.dimD_ = dimD;
  m.volume_ = volume;
  m.eigenvalues_ = std::move(eigenvalues);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < L; ++j)
      for (std::size_t k = 0; k < L; ++k)
        if (at(i, j, k) != 0.0) m.entries_.push_back({i, j, k, at(i, j, k)});
  if (m.kind_ == ModelKind::Point) m.fourier_ = {{{{}, 1.0 / std::sqrt(volume), 0.0}}};
  m.indexEntries();
  return m;
}

void SpectralModel::indexEntries() {
  byFirst_.assign(size(), {});
  for (std::size_t e = 0; e < entries_.size(); ++e) byFirst_[entries_[e].i].push_back(e);
}

std::string SpectralModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ModelKind::Point: os << "point"; break;
    case ModelKind::Circle: os << "circle(L=" << size() << ", radius=" << radius_ << ")"; break;
    case ModelKind::Torus: os << "torus(dim=" << dimD_ << ", L=" << size() << ")"; break;
    case ModelKind::Dense: os << "dense(dimD=" << dimD_ << ", L=" << size() << ")"; break;
  }
  return os.str();
}

double SpectralModel::triple(std::size_t i, std::size_t j, std::size_t k) const {
  for (std::size_t e : byFirst_.at(i)) {
    if (entries_[e].j == j && entries_[e].k == k) return entries_[e].value;
  }
  return 0.0;
}

SpectralFunction SpectralModel::constant(double value) const {
  return SpectralFunction::unit(size(), 0, value * std::sqrt(volume_));
}

double SpectralModel::mean(const SpectralFunction& w) const {
  checkCompatible(w);
  return w[0] / std::sqrt(volume_);
}

void SpectralModel::checkCompatible(const SpectralFunction& w) const {
  if (w.size() != size()) {
    throw InputError("spectral", "spectral function has " + std::to_string(w.size()) +
                                     " modes, model has " + std::to_string(size()));
  }
}

bool SpectralModel::sameAs(const SpectralModel& other) const noexcept {
  return this == &other || (kind_ == other.kind_ && dimD_ == other.dimD_ &&
                            volume_ == other.volume_ && eigenvalues_ == other.eigenvalues_ &&
                            entries_.size() == other.entries_.size());
}

SpectralFunction SpectralModel::multiply(const SpectralFunction& a, const SpectralFunction& b) const {
  checkCompatible(a);
  checkCompatible(b);
  SpectralFunction c(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t e : byFirst_[i]) {
      const auto& t = entries_[e];
      c[t.k] += t.value * a[i] * b[t.j];
    }
  }
  return c;
}

SpectralFunction SpectralModel::applyLaplacian(const SpectralFunction& w) const {
  checkCompatible(w);
  SpectralFunction out(size());
  for (std::size_t l = 0; l < size(); ++l) out[l] = -eigenvalues_[l] * w[l];
  return out;
}

EigenspaceDecomposition SpectralModel::eigenspace(double lambda) const {
  EigenspaceDecomposition e{lambda, {}};
  const double tol = kKernelTolerance * std::max(1.0, std::abs(lambda));
  for (std::size_t l = 0; l < size(); ++l) {
    if (std::abs(eigenvalues_[l] - lambda) <= tol) e.kernelIndices.push_back(l);
  }
  return e;
}

std::pair<SpectralFunction, SpectralFunction> SpectralModel::projectOntoEigenspace(
    const SpectralFunction& d, double lambda) const {
  checkCompatible(d);
  SpectralFunction d0(size());
  SpectralFunction dPerp = d;
  for (std::size_t l : eigenspace(lambda).kernelIndices) {
    d0[l] = d[l];
    dPerp[l] = 0.0;
  }
  return {d0, dPerp};
}

SpectralFunction SpectralModel::solveShiftedPoisson(const SpectralFunction& d, double mu,
                                                    double kernelTolerance) const {
  checkCompatible(d);
  const auto kernel = eigenspace(mu).kernelIndices;
  const double bound = kernelTolerance * std::max(1.0, d.norm());
  SpectralFunction c(size());
  std::size_t next = 0;
  for (std::size_t l = 0; l < size(); ++l) {
    if (next < kernel.size() && kernel[next] == l) {
      ++next;
      if (std::abs(d[l]) > bound) {
        std::ostringstream os;
        os << "right-hand side has kernel component " << d[l] << " in mode " << l
           << " at shift " << mu;
        throw SolvabilityViolation(os.str());
      }
      continue;
    }
    c[l] = d[l] / (mu - eigenvalues_[l]);
  }
  return c;
}

double SpectralModel::evaluateBasis(std::size_t l, std::span<const double> point) const {
  if (fourier_.empty()) {
    throw InputError("spectral", "pointwise evaluation needs a built-in trigonometric model");
  }
  if (point.size() != std::size_t(dimD_)) throw InputError("spectral", "point has wrong dimension");
  double value = 0.0;
  for (const auto& t : fourier_.at(l)) {
    double phase = 0.0;
    for (int q = 0; q < dimD_; ++q) phase += t.frequency[q] * point[q];
    value += t.re * std::cos(phase) - t.im * std::sin(phase);
  }
  return value;
}

SpectralFunction SpectralModel::projectSamples(
    const std::function<double(std::span<const double>)>& w, std::size_t samplesPerAxis) const {
  if (fourier_.empty()) {
    throw InputError("spectral", "sample projection needs a built-in trigonometric model");
  }
  if (samplesPerAxis < 1) throw InputError("spectral", "need at least one sample per axis");
  SpectralFunction out(size());
  if (dimD_ == 0) {
    const double value = w({});
    for (std::size_t l = 0; l < size(); ++l) out[l] = value * evaluateBasis(l, {}) * volume_;
    return out;
  }
  std::size_t total = 1;
  for (int q = 0; q < dimD_; ++q) total *= samplesPerAxis;
  const double cell = volume_ / double(total);
  const double step = 2.0 * std::numbers::pi / double(samplesPerAxis);
  std::vector<double> p(dimD_);
  std::vector<std::size_t> idx(dimD_, 0);
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t rest = s;
    for (int q = dimD_ - 1; q >= 0; --q) {
      idx[q] = rest % samplesPerAxis;
      rest /= samplesPerAxis;
      p[q] = step * double(idx[q]);
    }
    const double value = w(p);
    for (std::size_t l = 0; l < size(); ++l) out[l] += cell * value * evaluateBasis(l, p);
  }
  return out;
}

}  // namespace phg
