#include "nhep/sampler.hpp"

#include <cmath>

namespace nhep {

double Window::diagonal() const { return std::hypot(width(), height()); }

void Window::validate() const {
  if (!std::isfinite(p1_min) || !std::isfinite(p1_max) || !std::isfinite(p2_min) || !std::isfinite(p2_max))
    throw Error(errc::kDomain, "window bounds must be finite");
  if (!(p1_max > p1_min) || !(p2_max > p2_min)) throw Error(errc::kDomain, "window must have positive extent");
}

PairSampler toy_plane_sampler(const ToyParams& p) {
  return [p](double alpha, double beta) -> EigenPair {
    const Spectrum2<double> s = diagonalize(build_plane_hamiltonian(alpha, beta, p));
    return {s.lambda_plus, s.lambda_minus};
  };
}

}  // namespace nhep
