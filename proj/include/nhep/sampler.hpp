#pragma once

#include <array>
#include <complex>
#include <functional>

#include "nhep/toy_model.hpp"

namespace nhep {

/// Unordered eigenvalue pair at one parameter point.
using EigenPair = std::array<std::complex<double>, 2>;

/// Eigenvalue pair over a two-parameter plane. May throw to signal a
/// failed sample; callers count and skip such points.
using PairSampler = std::function<EigenPair(double p1, double p2)>;

struct Window {
  double p1_min = 0.0;
  double p1_max = 1.0;
  double p2_min = 0.0;
  double p2_max = 1.0;

  double width() const { return p1_max - p1_min; }
  double height() const { return p2_max - p2_min; }
  double diagonal() const;
  bool contains(double p1, double p2) const {
    return p1 >= p1_min && p1 <= p1_max && p2 >= p2_min && p2 <= p2_max;
  }
  // Throws Error(domain_error) for empty or non-finite windows.
  void validate() const;
};

/// (α, β) → (λ₊, λ₋) of the toy model, β continued past [0,1].
PairSampler toy_plane_sampler(const ToyParams& p);

}  // namespace nhep
