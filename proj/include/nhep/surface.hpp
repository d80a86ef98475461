#pragma once

// Riemann-sheet construction over a parameter plane, branch-cut
// extraction, eigenvalue continuation around closed loops (monodromy),
// and the analytic multivalued reference functions
//   f(z) = √((z−z₁)(z−z₂))   and   f(z) = (z−z₀)^{1/N}.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "nhep/ep_finder.hpp"
#include "nhep/sampler.hpp"

namespace nhep {

enum class DeltaMode {
  Raw,             // sheets hold λ
  RelativeToMean,  // sheets hold Δλ± = λ± − (λ₊+λ₋)/2, exact negatives
};

/// Edge between grid node (i, j) and (i+1, j) (horizontal) or (i, j+1)
/// (vertical). i indexes axis1, j indexes axis2.
struct GridEdge {
  int i = 0;
  int j = 0;
  bool vertical = false;

  friend bool operator==(const GridEdge&, const GridEdge&) = default;
};

struct SheetGrid {
  std::vector<double> axis1;
  std::vector<double> axis2;
  Eigen::MatrixXcd sheet1;  // (i, j)
  Eigen::MatrixXcd sheet2;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing;
  DeltaMode delta_mode = DeltaMode::Raw;

  // Edges where the continued sheets are discontinuous: nearest matching
  // across the edge swaps the labels, or the jump exceeds θ × the local
  // median edge jump. Depends on the continuation path.
  std::vector<GridEdge> cut_cells;
  // Edges across which the Re (resp. Im) parts of the two sheets meet,
  // i.e. where the component of the locally continued difference changes
  // sign. These are the cuts of the Re and Im surfaces drawn separately.
  std::vector<GridEdge> re_cut_edges;
  std::vector<GridEdge> im_cut_edges;

  int n1() const { return static_cast<int>(axis1.size()); }
  int n2() const { return static_cast<int>(axis2.size()); }
  std::size_t missing_count() const { return static_cast<std::size_t>(missing.count()); }
  std::array<double, 2> edge_midpoint(const GridEdge& e) const;
};

struct SurfaceOptions {
  int n1 = 128;
  int n2 = 64;
  DeltaMode delta_mode = DeltaMode::RelativeToMean;
  double cut_factor = 10.0;  // θ
  int median_radius = 2;
  double max_missing_fraction = 0.01;
  int threads = 1;
};

SheetGrid build_surface(const PairSampler& sampler, const Window& window, const SurfaceOptions& options = {});

struct CutComponent {
  std::vector<GridEdge> edges;
  std::array<std::array<double, 2>, 2> endpoints{};  // farthest-apart edge midpoints
  bool touches_boundary = false;                     // an edge lies within one cell of the window edge
};

/// Connected components of an edge set; two edges connect when they bound
/// a common grid cell. Sorted by their first edge in (j, i) order.
std::vector<CutComponent> cut_components(const SheetGrid& grid, std::span<const GridEdge> edges);

// --- loops -----------------------------------------------------------------

struct Circle {
  double center1 = 0.0;
  double center2 = 0.0;
  double radius = 1.0;
};

/// Closed polyline; the last vertex connects back to the first.
struct Polyline {
  std::vector<std::array<double, 2>> vertices;
};

using Loop = std::variant<Circle, Polyline>;

/// Point at arc-length fraction s ∈ [0, 1]; s = 0 and s = 1 coincide.
std::array<double, 2> loop_point(const Loop& loop, double s);

/// Winding number of the loop around (p1, p2); the polyline is evaluated
/// exactly, the circle by distance to its center.
int winding_number(const Loop& loop, double p1, double p2);

enum class Permutation { Identity, Swap };

Permutation compose(Permutation a, Permutation b);
std::string to_string(Permutation p);

struct LoopResult {
  Permutation permutation = Permutation::Identity;
  int n_steps = 0;  // accepted continuation steps
  double max_step_jump = 0.0;
  double min_gap = 0.0;  // smallest |λ₁−λ₂| met on the loop
  std::vector<EpLocation> enclosed_eps;
};

struct EncircleOptions {
  int n_steps = 64;
  double jump_factor = 0.2;       // halve the step while max |Δλ| > factor × gap
  double min_step = 1e-10;        // step floor, as a fraction of the loop
  double closure_tolerance = 1e-8;
  std::vector<EpLocation> known_eps;  // reported back in enclosed_eps when wound around
};

LoopResult encircle(const PairSampler& sampler, const Loop& loop, const EncircleOptions& options = {});

// --- analytic oracle ----------------------------------------------------------

struct TwoPointOracle {
  std::complex<double> z1;
  std::complex<double> z2;
};

struct SinglePointOracle {
  std::complex<double> z0;
  int order = 2;
};

using AnalyticOracle = std::variant<TwoPointOracle, SinglePointOracle>;

struct OracleValue {
  std::complex<double> first;
  std::complex<double> second;
  bool at_branch_point = false;
};

/// The pair ±√((z−z₁)(z−z₂)), or the first two of the N principal-branch
/// values of (z−z₀)^{1/N}. At a branch point both values are 0 and the
/// flag is set.
OracleValue oracle_eval(const AnalyticOracle& oracle, std::complex<double> z);

/// All N values of (z−z₀)^{1/N}, k = 0 … N−1, starting at the principal one.
std::vector<std::complex<double>> oracle_roots(const SinglePointOracle& oracle, std::complex<double> z);

/// (p1, p2) ↦ oracle_eval(p1 + i·p2). Requires a pair-valued oracle
/// (two-point, or single-point of order 2).
PairSampler oracle_sampler(const AnalyticOracle& oracle);

void validate(const AnalyticOracle& oracle);

}  // namespace nhep
