#pragma once

// Two-level non-Hermitian Hamiltonian, its closed-form spectrum, and the
// coalescence observables (overlap integral, Shannon entropy).

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "nhep/error.hpp"

namespace nhep {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using Vector2c = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

template <typename Scalar>
using VectorXc = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Below this |η| the matrix is treated as numerically defective.
inline constexpr double kDegeneracyThreshold = 1e-8;

template <typename Scalar>
bool is_finite(const std::complex<Scalar>& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Principal square root with Re ≥ 0; on the imaginary axis Im ≥ 0.
///
/// std::sqrt honours the sign of a zero imaginary part, so sqrt(-4 - 0i)
/// is -2i. Here both sides of the negative real axis map to +2i.
template <typename Scalar>
std::complex<Scalar> principal_sqrt(const std::complex<Scalar>& z) {
  std::complex<Scalar> r = std::sqrt(z);
  if (r.real() == Scalar(0) && r.imag() < Scalar(0)) r = -r;
  if (r.real() < Scalar(0)) r = -r;
  return r;
}

/// [[ξ₁, g], [g, ξ₂]]: symmetric, non-Hermitian whenever Im(g) ≠ 0.
template <typename Scalar = double>
struct Hamiltonian2 {
  Complex<Scalar> xi1{};
  Complex<Scalar> xi2{};
  Complex<Scalar> g{};

  Matrix2c<Scalar> matrix() const {
    Matrix2c<Scalar> m;
    m << xi1, g, g, xi2;
    return m;
  }

  Complex<Scalar> trace() const { return xi1 + xi2; }
  Complex<Scalar> determinant() const { return xi1 * xi2 - g * g; }

  bool finite() const { return is_finite(xi1) && is_finite(xi2) && is_finite(g); }
};

template <typename Scalar = double>
struct Spectrum2 {
  Complex<Scalar> lambda_plus{};
  Complex<Scalar> lambda_minus{};
  Complex<Scalar> eta{};
  Vector2c<Scalar> v_plus = Vector2c<Scalar>::Zero();
  Vector2c<Scalar> v_minus = Vector2c<Scalar>::Zero();
  // |η| < kDegeneracyThreshold: v_plus == v_minus is the coalesced vector.
  bool degenerate = false;

  Complex<Scalar> mean() const { return (lambda_plus + lambda_minus) / Scalar(2); }
  Complex<Scalar> gap() const { return lambda_plus - lambda_minus; }
};

namespace detail {

// Kernel of H - λ for the symmetric 2x2 matrix. Both (g, λ-ξ₁) and
// (λ-ξ₂, g) solve it; the longer one is the better conditioned.
template <typename Scalar>
Vector2c<Scalar> kernel_vector(const Hamiltonian2<Scalar>& h, const Complex<Scalar>& lambda) {
  Vector2c<Scalar> a(h.g, lambda - h.xi1);
  Vector2c<Scalar> b(lambda - h.xi2, h.g);
  Vector2c<Scalar> v = a.squaredNorm() >= b.squaredNorm() ? a : b;
  const Scalar n = v.norm();
  if (n == Scalar(0)) return Vector2c<Scalar>(Complex<Scalar>(1), Complex<Scalar>(0));
  return v / n;
}

}  // namespace detail

/// Closed-form eigen-decomposition: λ± = (ξ₁+ξ₂)/2 ± η,
/// η = √((ξ₁−ξ₂)²/4 + g²) on the principal branch.
///
/// The ± labels carry no identity across parameter space; continuation
/// code assigns identity.
template <typename Scalar>
Spectrum2<Scalar> diagonalize(const Hamiltonian2<Scalar>& h) {
  if (!h.finite()) throw Error(errc::kDomain, "diagonalize: non-finite Hamiltonian entry");

  const Complex<Scalar> mean = (h.xi1 + h.xi2) / Scalar(2);
  const Complex<Scalar> half_diff = (h.xi1 - h.xi2) / Scalar(2);

  Spectrum2<Scalar> s;
  s.eta = principal_sqrt(half_diff * half_diff + h.g * h.g);
  s.lambda_plus = mean + s.eta;
  s.lambda_minus = mean - s.eta;
  s.degenerate = std::abs(s.eta) < Scalar(kDegeneracyThreshold);
  if (s.degenerate) {
    s.v_plus = detail::kernel_vector(h, mean);
    s.v_minus = s.v_plus;
  } else {
    s.v_plus = detail::kernel_vector(h, s.lambda_plus);
    s.v_minus = detail::kernel_vector(h, s.lambda_minus);
  }
  return s;
}

/// Sampled stand-in for a wavefunction: complex samples with positive
/// quadrature weights.
template <typename Scalar = double>
class DiscreteField {
public:
  DiscreteField(VectorXc<Scalar> samples, VectorX<Scalar> weights)
      : samples_(std::move(samples)), weights_(std::move(weights)) {
    if (samples_.size() < 1) throw Error(errc::kDomain, "DiscreteField: empty field");
    if (samples_.size() != weights_.size())
      throw Error(errc::kSizeMismatch, "DiscreteField: samples and weights differ in length");
    for (Eigen::Index i = 0; i < samples_.size(); ++i) {
      if (!is_finite(samples_[i])) throw Error(errc::kDomain, "DiscreteField: non-finite sample");
      if (!(weights_[i] > Scalar(0)) || !std::isfinite(weights_[i]))
        throw Error(errc::kDomain, "DiscreteField: weights must be positive");
    }
  }

  static DiscreteField uniform(VectorXc<Scalar> samples) {
    VectorX<Scalar> w = VectorX<Scalar>::Ones(samples.size());
    return DiscreteField(std::move(samples), std::move(w));
  }

  const VectorXc<Scalar>& samples() const { return samples_; }
  const VectorX<Scalar>& weights() const { return weights_; }
  Eigen::Index size() const { return samples_.size(); }

  Scalar norm() const { return std::sqrt((weights_.array() * samples_.array().abs2()).sum()); }

private:
  VectorXc<Scalar> samples_;
  VectorX<Scalar> weights_;
};

/// O_L = |Σ w·conj(f1)·f2| / (X₁X₂), X_i = √(Σ w·|f_i|²).
template <typename Scalar>
Scalar overlap(const DiscreteField<Scalar>& f1, const DiscreteField<Scalar>& f2) {
  if (f1.size() != f2.size()) throw Error(errc::kSizeMismatch, "overlap: sample counts differ");
  const Scalar x1 = f1.norm();
  const Scalar x2 = f2.norm();
  if (x1 == Scalar(0) || x2 == Scalar(0)) throw Error(errc::kDegenerateField, "degenerate field");
  // Weights are taken from f1; fields on the same grid share them.
  const Complex<Scalar> inner =
      (f1.weights().array().template cast<Complex<Scalar>>() * f1.samples().array().conjugate() *
       f2.samples().array())
          .sum();
  return std::abs(inner) / (x1 * x2);
}

template <typename Scalar>
Scalar overlap(const Vector2c<Scalar>& a, const Vector2c<Scalar>& b) {
  return overlap(DiscreteField<Scalar>::uniform(a), DiscreteField<Scalar>::uniform(b));
}

/// −Σ ρ log ρ of the normalized intensity ρ = w|f|²/Σ w|f|² (natural log).
template <typename Scalar>
Scalar shannon_entropy(const DiscreteField<Scalar>& f) {
  const VectorX<Scalar> intensity = f.weights().array() * f.samples().array().abs2();
  const Scalar total = intensity.sum();
  if (total == Scalar(0)) throw Error(errc::kDegenerateField, "degenerate field");
  Scalar h = 0;
  for (Eigen::Index i = 0; i < intensity.size(); ++i) {
    const Scalar rho = intensity[i] / total;
    if (rho > Scalar(0)) h -= rho * std::log(rho);
  }
  return h;
}

}  // namespace nhep
