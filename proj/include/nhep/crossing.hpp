#pragma once

// One-parameter scan analysis: continuity matching of eigenvalue pairs,
// Landau–Zener vs. width-bifurcation classification, the critical β of
// the transition, and overlap-integral peaks.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nhep/core.hpp"
#include "nhep/sampler.hpp"
#include "nhep/toy_model.hpp"

namespace nhep {

struct ScanTrajectory {
  std::vector<double> ts;
  std::vector<std::complex<double>> branch_a;
  std::vector<std::complex<double>> branch_b;
  std::vector<std::size_t> ambiguous_points;  // pairing could not be decided; previous order kept

  std::size_t size() const { return ts.size(); }
};

/// Greedy continuation from the first point: at each step take the pairing
/// that minimizes Σ|Δλ|. Requires ≥ 3 points and strictly increasing ts.
ScanTrajectory match_branches(std::span<const double> ts, std::span<const EigenPair> raw);

enum class CrossingLabel {
  LandauZener,       // Re avoided, Im crosses
  WidthBifurcation,  // Re crosses, Im avoided (bifurcates)
};

std::string to_string(CrossingLabel label);

struct ClassReport {
  CrossingLabel label = CrossingLabel::LandauZener;
  double re_min_gap = 0.0;
  double im_min_gap = 0.0;
  std::vector<double> re_cross_points;
  std::vector<double> im_cross_points;
  std::optional<std::pair<double, double>> bifurcation_edges;
};

struct ClassifyOptions {
  double gap_floor = 1e-9;
  double edge_factor = 5.0;
  double baseline_fraction = 0.1;  // each scan end contributes this share to the baseline median
};

/// Throws Error(unclassified) when both components cross or both are
/// avoided; the message carries the gap and crossing diagnostics.
ClassReport classify(const ScanTrajectory& traj, const ClassifyOptions& options = {});

struct AlphaScan {
  double alpha_min = 0.0;
  double alpha_max = 2.0;
  int points = 2001;

  std::vector<double> values() const;
};

struct ToyScan {
  std::vector<double> alphas;
  std::vector<Spectrum2<double>> spectra;

  ScanTrajectory trajectory() const;
};

ToyScan toy_scan(const ToyParams& p, const AlphaScan& scan, int threads = 1);

/// Bisection on β of the classify label across the window, to within
/// `resolution`. Throws Error(no_transition) when both ends agree.
double beta_transition(ToyParams p, std::pair<double, double> beta_window, const AlphaScan& scan = {},
                       const ClassifyOptions& options = {}, double resolution = 1e-4);

/// O_L(v₊, v₋) at every scan point.
std::vector<double> overlap_profile(std::span<const Spectrum2<double>> spectra);

/// Shannon entropy of the two-component intensity of v₊ at every point.
std::vector<double> entropy_profile(std::span<const Spectrum2<double>> spectra);

/// Scan positions of local maxima of the overlap profile exceeding
/// `min_height`; a flat-topped maximum reports its midpoint.
std::vector<double> overlap_peaks(std::span<const double> ts, std::span<const Spectrum2<double>> spectra,
                                  double min_height = 1e-6);

/// Local maxima of a sampled profile. Neighbouring samples closer than
/// `flat_tolerance` (relative to max(1,|v|)) form one flat run.
std::vector<double> profile_peaks(std::span<const double> ts, std::span<const double> values, double min_height,
                                  double flat_tolerance = 1e-12);

}  // namespace nhep
