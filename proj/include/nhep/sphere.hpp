#pragma once

// Stereographic projection between the extended (n, χ) parameter plane and
// the unit sphere, projecting from the north pole (0, 0, 1) onto the
// equatorial plane.

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nhep/error.hpp"

namespace nhep {

template <typename Scalar = double>
struct PlanePoint {
  Scalar n{};
  Scalar chi{};
  bool at_infinity = false;

  static PlanePoint infinity() { return {Scalar(0), Scalar(0), true}; }
};

template <typename Scalar = double>
struct SpherePoint {
  Scalar tn{};
  Scalar tchi{};
  Scalar txi{};  // auxiliary third axis

  Eigen::Matrix<Scalar, 3, 1> vector() const { return {tn, tchi, txi}; }
  bool is_north_pole() const { return tn == Scalar(0) && tchi == Scalar(0) && txi == Scalar(1); }
};

/// Π⁻¹(n, χ) = (2n, 2χ, n²+χ²−1)/ζ, ζ = n²+χ²+1; ∞ ↦ (0, 0, 1).
template <typename Scalar>
SpherePoint<Scalar> to_sphere(const PlanePoint<Scalar>& p) {
  if (p.at_infinity) return {Scalar(0), Scalar(0), Scalar(1)};
  if (!std::isfinite(p.n) || !std::isfinite(p.chi)) throw Error(errc::kDomain, "to_sphere: non-finite plane point");
  const Scalar r2 = p.n * p.n + p.chi * p.chi;
  const Scalar zeta = r2 + Scalar(1);
  return {Scalar(2) * p.n / zeta, Scalar(2) * p.chi / zeta, (r2 - Scalar(1)) / zeta};
}

/// Π(ñ, χ̃, ξ̃) = (ñ, χ̃)/(1 − ξ̃); the north pole maps to ∞.
template <typename Scalar>
PlanePoint<Scalar> to_plane(const SpherePoint<Scalar>& s) {
  const Scalar norm2 = s.tn * s.tn + s.tchi * s.tchi + s.txi * s.txi;
  if (!std::isfinite(norm2) || std::abs(std::sqrt(norm2) - Scalar(1)) > Scalar(1e-9))
    throw Error(errc::kDomain, "to_plane: sphere point is not unit-norm");
  const Scalar rho2 = s.tn * s.tn + s.tchi * s.tchi;
  if (rho2 == Scalar(0) && s.txi > Scalar(0)) return PlanePoint<Scalar>::infinity();
  // 1 − ξ̃ cancels near the north pole; on the upper hemisphere use the
  // equivalent (ñ² + χ̃²)/(1 + ξ̃).
  const Scalar denom = s.txi > Scalar(0) ? rho2 / (Scalar(1) + s.txi) : Scalar(1) - s.txi;
  return {s.tn / denom, s.tchi / denom, false};
}

template <typename Scalar>
std::vector<SpherePoint<Scalar>> lift_cut(std::span<const PlanePoint<Scalar>> curve) {
  std::vector<SpherePoint<Scalar>> out;
  out.reserve(curve.size());
  for (const auto& p : curve) out.push_back(to_sphere(p));
  return out;
}

}  // namespace nhep
