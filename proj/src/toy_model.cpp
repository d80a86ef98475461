#include "nhep/toy_model.hpp"

#include <cmath>

namespace nhep {
namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw Error(errc::kDomain, "toy model: alpha must be finite and >= 0, got " + std::to_string(alpha));
}

std::complex<double> level_difference(const LevelPair& x, SensitivityMode mode) {
  const std::complex<double> d = x.xi1 - x.xi2;
  return mode == SensitivityMode::FullComplexDifference ? d : std::complex<double>(d.real(), 0.0);
}

std::complex<double> coupling_unchecked(double alpha, double beta, const ToyParams& p) {
  const LevelPair x = xi(alpha, p);
  const std::complex<double> d = level_difference(x, p.mode);
  return p.g_c * ((1.0 - beta) + kI * beta) * std::exp(-d * d);
}

}  // namespace

void ToyParams::validate() const {
  if (!std::isfinite(g_c) || !(g_c > 0.0)) throw Error(errc::kDomain, "ToyParams: g_c must be > 0");
  if (!std::isfinite(beta) || beta < 0.0 || beta > 1.0)
    throw Error(errc::kDomain, "ToyParams: beta must lie in [0, 1]");
  if (!std::isfinite(gamma1) || !std::isfinite(gamma2))
    throw Error(errc::kDomain, "ToyParams: gamma values must be finite");
}

LevelPair xi(double alpha, const ToyParams& p) {
  check_alpha(alpha);
  return {std::complex<double>(1.0 - alpha / 2.0, p.gamma1), std::complex<double>(std::sqrt(alpha), p.gamma2)};
}

std::complex<double> sensitivity(double alpha, const ToyParams& p) {
  const std::complex<double> d = level_difference(xi(alpha, p), p.mode);
  return std::exp(-d * d);
}

std::complex<double> coupling(double alpha, const ToyParams& p) {
  p.validate();
  check_alpha(alpha);
  return coupling_unchecked(alpha, p.beta, p);
}

Hamiltonian2<double> build_hamiltonian(double alpha, const ToyParams& p) {
  p.validate();
  return build_plane_hamiltonian(alpha, p.beta, p);
}

Hamiltonian2<double> build_plane_hamiltonian(double alpha, double beta, const ToyParams& p) {
  if (!std::isfinite(beta)) throw Error(errc::kDomain, "toy model: beta must be finite");
  const LevelPair x = xi(alpha, p);
  return {x.xi1, x.xi2, coupling_unchecked(alpha, beta, p)};
}

std::complex<double> discriminant(double alpha, const ToyParams& p) {
  const Hamiltonian2<double> h = build_hamiltonian(alpha, p);
  const std::complex<double> d = h.xi1 - h.xi2;
  return d * d + 4.0 * h.g * h.g;
}

std::optional<ToyPreset> toy_preset(const std::string& name) {
  auto make = [&](double beta, double g1, double g2, const char* n_in) {
    ToyPreset t{name, ToyParams{0.043, beta, g1, g2, SensitivityMode::FullComplexDifference}, {}};
    if (n_in) t.metadata["n_in"] = n_in;
    return t;
  };
  // Reference parameter classes; n_in is the matching cavity index.
  if (name == "class1") return make(0.76, 1.05, 1.07, "2.6");
  if (name == "class2") return make(0.78, 1.05, 1.07, "2.6257");
  if (name == "class3" || name == "class3a") return make(1.0, 1.05, 1.07, "2.74");
  if (name == "class3b") return make(1.0, 1.07, 1.05, "2.74");
  if (name == "class4") return make(0.78, 1.07, 1.05, "2.9036");
  if (name == "class5") return make(0.76, 1.07, 1.05, "2.94");
  if (name == "real-coupling") return make(0.0, 1.05, 1.07, nullptr);
  if (name == "double-ep")
    return ToyPreset{name, ToyParams{0.05, 1.0, 1.05, 1.05, SensitivityMode::FullComplexDifference}, {}};
  return std::nullopt;
}

std::vector<std::string> toy_preset_names() {
  return {"class1", "class2", "class3", "class3a", "class3b", "class4", "class5", "real-coupling", "double-ep"};
}

std::string to_string(SensitivityMode mode) {
  return mode == SensitivityMode::FullComplexDifference ? "full-complex-difference" : "real-part-difference";
}

SensitivityMode sensitivity_mode_from_string(const std::string& s) {
  if (s == "full-complex-difference" || s == "full") return SensitivityMode::FullComplexDifference;
  if (s == "real-part-difference" || s == "real") return SensitivityMode::RealPartDifference;
  throw Error(errc::kConfig, "unknown sensitivity mode '" + s + "'");
}

}  // namespace nhep
