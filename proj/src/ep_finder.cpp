#include "nhep/ep_finder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include <Eigen/Dense>

#include "nhep/parallel.hpp"

namespace nhep {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Brent's bracketed root finder on [a, b] with f(a)·f(b) ≤ 0.
template <typename F>
double brent_root(F&& f, double a, double b, double fa, double fb, int max_iterations) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iterations; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 1e-300;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  std::ostringstream os;
  os.precision(17);
  os << "bracketed root refinement did not converge; best iterate alpha=" << b << " f=" << fb;
  throw Error(errc::kNonConvergence, os.str());
}

template <typename F>
double golden_minimize(F&& f, double a, double b, int max_iterations) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iterations && (b - a) > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

double splitting(const ToyParams& p, double alpha) {
  return std::abs(diagonalize(build_hamiltonian(alpha, p)).gap());
}

double safe_gap(const PairSampler& sampler, double p1, double p2) {
  try {
    const EigenPair e = sampler(p1, p2);
    const double g = std::abs(e[0] - e[1]);
    return std::isfinite(g) ? g : kInf;
  } catch (const std::exception&) {
    return kInf;
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return kInf;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

std::vector<EpLocation> toy_ep_roots(const ToyParams& p, std::pair<double, double> alpha_bracket,
                                     const RootOptions& options) {
  p.validate();
  const auto [lo, hi] = alpha_bracket;
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi))
    throw Error(errc::kDomain, "toy_ep_roots: bracket must satisfy 0 <= lo < hi");
  const int n = std::max(options.samples, 8);

  std::vector<double> alphas(n + 1);
  std::vector<std::complex<double>> disc(n + 1);
  for (int k = 0; k <= n; ++k) {
    alphas[k] = lo + (hi - lo) * k / n;
    disc[k] = discriminant(alphas[k], p);
  }

  auto re_disc = [&](double a) { return discriminant(a, p).real(); };
  auto abs_disc = [&](double a) { return std::abs(discriminant(a, p)); };

  std::vector<double> found;
  for (int k = 0; k < n; ++k) {
    const double f0 = disc[k].real(), f1 = disc[k + 1].real();
    if ((f0 <= 0.0 && f1 >= 0.0) || (f0 >= 0.0 && f1 <= 0.0)) {
      const double a = brent_root(re_disc, alphas[k], alphas[k + 1], f0, f1, options.max_iterations);
      if (abs_disc(a) / 4.0 < options.eta_sq_tolerance) found.push_back(a);
    }
  }
  for (int k = 1; k < n; ++k) {
    const double m = std::abs(disc[k]);
    if (m <= std::abs(disc[k - 1]) && m <= std::abs(disc[k + 1])) {
      const double a = golden_minimize(abs_disc, alphas[k - 1], alphas[k + 1], options.max_iterations);
      if (abs_disc(a) / 4.0 < options.eta_sq_tolerance) found.push_back(a);
    }
  }

  std::sort(found.begin(), found.end());
  std::vector<EpLocation> roots;
  const double merge = 10.0 * (hi - lo) / n;
  for (double a : found) {
    const double r = splitting(p, a);
    if (!roots.empty() && a - roots.back().p1 < merge) {
      if (r < roots.back().residual) roots.back() = {a, p.beta, r, 2};
      continue;
    }
    roots.push_back({a, p.beta, r, 2});
  }
  return roots;
}

EpLocation refine_ep_candidate(const PairSampler& sampler, const Window& window, double seed_p1, double seed_p2,
                               const GridSearchOptions& options) {
  window.validate();
  using Vec = Eigen::Vector2d;
  const Vec origin(window.p1_min, window.p2_min);
  const Vec extent(window.width(), window.height());
  auto to_param = [&](const Vec& u) -> Vec { return origin + u.cwiseProduct(extent); };
  auto clamp = [](Vec u) { return u.cwiseMax(0.0).cwiseMin(1.0); };
  // |Δλ|⁴ is smooth at a square-root branch point, |Δλ| is not.
  auto objective = [&](const Vec& u) {
    const Vec x = to_param(u);
    const double g = safe_gap(sampler, x[0], x[1]);
    return g * g * g * g;
  };

  const double cell = 1.0 / std::max(options.coarse_n - 1, 1);
  Vec seed = clamp(Vec((seed_p1 - window.p1_min) / window.width(), (seed_p2 - window.p2_min) / window.height()));
  std::array<Vec, 3> simplex{seed, clamp(seed + Vec(cell, 0)), clamp(seed + Vec(0, cell))};
  if ((simplex[1] - seed).norm() == 0) simplex[1] = clamp(seed - Vec(cell, 0));
  if ((simplex[2] - seed).norm() == 0) simplex[2] = clamp(seed - Vec(0, cell));
  std::array<double, 3> f{objective(simplex[0]), objective(simplex[1]), objective(simplex[2])};
  int evals = 3;

  while (evals < options.max_evaluations) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
    const Vec best = simplex[idx[0]], mid = simplex[idx[1]], worst = simplex[idx[2]];
    const double fb = f[idx[0]], fm = f[idx[1]], fw = f[idx[2]];
    const double size = std::max((mid - best).norm(), (worst - best).norm());
    if (size < 1e-15 || fb == 0.0) break;

    const Vec centroid = 0.5 * (best + mid);
    const Vec reflected = clamp(centroid + (centroid - worst));
    const double fr = objective(reflected);
    ++evals;
    auto replace_worst = [&](const Vec& v, double fv) {
      simplex[idx[2]] = v;
      f[idx[2]] = fv;
    };
    if (fr < fb) {
      const Vec expanded = clamp(centroid + 2.0 * (centroid - worst));
      const double fe = objective(expanded);
      ++evals;
      fe < fr ? replace_worst(expanded, fe) : replace_worst(reflected, fr);
    } else if (fr < fm) {
      replace_worst(reflected, fr);
    } else {
      const bool outside = fr < fw;
      const Vec contracted = outside ? clamp(centroid + 0.5 * (reflected - centroid)) : clamp(centroid + 0.5 * (worst - centroid));
      const double fc = objective(contracted);
      ++evals;
      if (fc < std::min(fr, fw)) {
        replace_worst(contracted, fc);
      } else {
        simplex[idx[1]] = best + 0.5 * (mid - best);
        simplex[idx[2]] = best + 0.5 * (worst - best);
        f[idx[1]] = objective(simplex[idx[1]]);
        f[idx[2]] = objective(simplex[idx[2]]);
        evals += 2;
      }
    }
  }

  const auto best_it = std::min_element(f.begin(), f.end());
  const Vec x = to_param(simplex[static_cast<std::size_t>(best_it - f.begin())]);
  return {x[0], x[1], safe_gap(sampler, x[0], x[1]), 2};
}

GridSearchResult grid_ep_search(const PairSampler& sampler, const Window& window, const GridSearchOptions& options) {
  window.validate();
  if (options.coarse_n < 8) throw Error(errc::kDomain, "grid_ep_search: coarse_n must be >= 8");
  const int n = options.coarse_n;
  auto p1_at = [&](int i) { return window.p1_min + window.width() * i / (n - 1); };
  auto p2_at = [&](int j) { return window.p2_min + window.height() * j / (n - 1); };

  GridSearchResult result;
  result.tolerance = options.rel_tolerance * window.diagonal();

  std::vector<double> gap(static_cast<std::size_t>(n) * n, kInf);
  parallel_for(gap.size(), options.threads, [&](std::size_t k) {
    const int i = static_cast<int>(k % n), j = static_cast<int>(k / n);
    gap[k] = safe_gap(sampler, p1_at(i), p2_at(j));
  });
  auto at = [&](int i, int j) { return gap[static_cast<std::size_t>(j) * n + i]; };
  result.skipped_points = static_cast<std::size_t>(std::count(gap.begin(), gap.end(), kInf));

  struct Seed {
    int i, j;
    double local_median;
  };
  std::vector<Seed> seeds;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v = at(i, j);
      if (!std::isfinite(v)) continue;
      bool minimum = true, strict = false;
      for (int dj = -1; dj <= 1 && minimum; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if ((di == 0 && dj == 0) || i + di < 0 || i + di >= n || j + dj < 0 || j + dj >= n) continue;
          const double w = at(i + di, j + dj);
          if (!std::isfinite(w)) continue;
          if (w < v) {
            minimum = false;
            break;
          }
          if (w > v) strict = true;
        }
      }
      if (!minimum || !strict) continue;
      std::vector<double> block;
      const int r = options.median_radius;
      for (int jj = std::max(0, j - r); jj <= std::min(n - 1, j + r); ++jj)
        for (int ii = std::max(0, i - r); ii <= std::min(n - 1, i + r); ++ii)
          if (std::isfinite(at(ii, jj))) block.push_back(at(ii, jj));
      seeds.push_back({i, j, median(std::move(block))});
    }
  }
  result.candidates = seeds.size();

  std::vector<EpLocation> refined(seeds.size());
  parallel_for(seeds.size(), options.threads, [&](std::size_t k) {
    refined[k] = refine_ep_candidate(sampler, window, p1_at(seeds[k].i), p2_at(seeds[k].j), options);
  });

  const double dedup = 10.0 * result.tolerance;
  std::vector<EpLocation> accepted;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const EpLocation& e = refined[k];
    if (!(e.residual <= result.tolerance) || !(e.residual < options.accept_factor * seeds[k].local_median)) {
      ++result.rejected;
      continue;
    }
    accepted.push_back(e);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const EpLocation& a, const EpLocation& b) { return std::tie(a.p1, a.p2) < std::tie(b.p1, b.p2); });
  for (const EpLocation& e : accepted) {
    const bool duplicate = std::any_of(result.eps.begin(), result.eps.end(), [&](const EpLocation& q) {
      return std::hypot(q.p1 - e.p1, q.p2 - e.p2) < dedup;
    });
    if (!duplicate) result.eps.push_back(e);
  }
  return result;
}

}  // namespace nhep
