#pragma once

// Parametrized two-level toy Hamiltonian: real-part level trajectories
// ξ₁ʳ(α) = 1 − α/2, ξ₂ʳ(α) = √α with fixed widths, coupled through
// g = g_c·[(1−β) + iβ]·exp[−(ξ₁−ξ₂)²].

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nhep/core.hpp"

namespace nhep {

enum class SensitivityMode {
  FullComplexDifference,  // Λ = exp[−(ξ₁−ξ₂)²] with complex ξ
  RealPartDifference,     // Λ = exp[−(ξ₁ʳ−ξ₂ʳ)²], always real
};

struct ToyParams {
  double g_c = 0.05;
  double beta = 1.0;
  double gamma1 = 1.05;  // Im ξ₁
  double gamma2 = 1.05;  // Im ξ₂
  SensitivityMode mode = SensitivityMode::FullComplexDifference;

  // Throws Error(domain_error) unless 0 ≤ β ≤ 1, g_c > 0 and all finite.
  void validate() const;
};

struct LevelPair {
  std::complex<double> xi1;
  std::complex<double> xi2;
};

LevelPair xi(double alpha, const ToyParams& p);

/// Λ_α; real in RealPartDifference mode.
std::complex<double> sensitivity(double alpha, const ToyParams& p);

std::complex<double> coupling(double alpha, const ToyParams& p);

Hamiltonian2<double> build_hamiltonian(double alpha, const ToyParams& p);

/// 4η² = (ξ₁−ξ₂)² + 4g². EPs are its zeros.
std::complex<double> discriminant(double alpha, const ToyParams& p);

/// Same Hamiltonian with β taken from the argument and allowed outside
/// [0,1]. Both EPs of the β=1 model lie on the line β=1, so loops and
/// surfaces that enclose them need the analytic continuation of the
/// coupling formula past it. α ≥ 0 is still required.
Hamiltonian2<double> build_plane_hamiltonian(double alpha, double beta, const ToyParams& p);

/// A named parameter set with optional provenance metadata (e.g. the
/// cavity refractive index the class corresponds to).
struct ToyPreset {
  std::string name;
  ToyParams params;
  std::map<std::string, std::string> metadata;
};

/// class1 … class5 (class3 = class3a, class3b swaps the widths), real-coupling
/// (g_c=0.043, β=0) and double-ep (g_c=0.05, β=1, equal widths).
std::optional<ToyPreset> toy_preset(const std::string& name);
std::vector<std::string> toy_preset_names();

std::string to_string(SensitivityMode mode);
SensitivityMode sensitivity_mode_from_string(const std::string& s);

}  // namespace nhep
