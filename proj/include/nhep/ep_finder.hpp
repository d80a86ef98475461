#pragma once

// Exceptional-point localization: closed-form discriminant roots for the
// toy model along α, and a generic coarse-grid + simplex search over any
// two-parameter eigenvalue sampler.

#include <cstddef>
#include <utility>
#include <vector>

#include "nhep/sampler.hpp"
#include "nhep/toy_model.hpp"

namespace nhep {

struct EpLocation {
  double p1 = 0.0;
  double p2 = 0.0;
  double residual = 0.0;  // |λ₊ − λ₋| at (p1, p2)
  int order = 2;
};

struct RootOptions {
  int samples = 4000;              // bracket subdivision for candidate search
  double eta_sq_tolerance = 1e-10; // accept when |η|² falls below this
  int max_iterations = 200;
};

/// All α in the bracket where η(α, β) = 0 for the fixed β in p, sorted.
///
/// Candidates come from sign changes of Re(4η²) and from local minima of
/// |4η²| on a fine subdivision; each is refined by a bracketed solver
/// (sign change) or golden-section search (minimum). An empty result is
/// not an error.
std::vector<EpLocation> toy_ep_roots(const ToyParams& p, std::pair<double, double> alpha_bracket,
                                     const RootOptions& options = {});

struct GridSearchOptions {
  int coarse_n = 64;
  double rel_tolerance = 1e-6;  // residual and positional tolerance, × window diagonal
  double accept_factor = 1e-3;  // residual < factor × local median coarse gap
  int median_radius = 4;        // half-width of the local median block, in cells
  int max_evaluations = 4000;   // per candidate
  int threads = 1;
};

struct GridSearchResult {
  std::vector<EpLocation> eps;  // sorted on (p1, p2)
  std::size_t skipped_points = 0;
  std::size_t candidates = 0;
  std::size_t rejected = 0;
  double tolerance = 0.0;  // residual bound actually applied
};

GridSearchResult grid_ep_search(const PairSampler& sampler, const Window& window,
                                const GridSearchOptions& options = {});

/// Simplex refinement of |λ₁−λ₂| from one seed, clamped to the window.
/// No acceptance filtering; used by grid_ep_search and by tests.
EpLocation refine_ep_candidate(const PairSampler& sampler, const Window& window, double seed_p1,
                               double seed_p2, const GridSearchOptions& options = {});

}  // namespace nhep
