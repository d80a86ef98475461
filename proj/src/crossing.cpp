#include "nhep/crossing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nhep/parallel.hpp"

namespace nhep {
namespace {

enum class ComponentState { Avoided, Crossed, Touched };

struct ComponentAnalysis {
  ComponentState state = ComponentState::Avoided;
  double min_gap = 0.0;
  std::vector<double> cross_points;
};

// Sign changes are counted between consecutive samples whose |d| exceeds
// the floor; samples inside the floor neither start nor end a crossing.
ComponentAnalysis analyze_component(const std::vector<double>& ts, const std::vector<double>& d, double floor) {
  ComponentAnalysis out;
  out.min_gap = std::abs(d.front());
  std::ptrdiff_t last = -1;
  for (std::size_t k = 0; k < d.size(); ++k) {
    out.min_gap = std::min(out.min_gap, std::abs(d[k]));
    if (std::abs(d[k]) <= floor) continue;
    if (last >= 0 && (d[k] > 0) != (d[static_cast<std::size_t>(last)] > 0)) {
      const std::size_t l = static_cast<std::size_t>(last);
      double t;
      if (l + 1 == k) {
        t = ts[l] + (ts[k] - ts[l]) * d[l] / (d[l] - d[k]);
      } else {
        t = 0.5 * (ts[l] + ts[k]);
      }
      out.cross_points.push_back(t);
    }
    last = static_cast<std::ptrdiff_t>(k);
  }
  if (!out.cross_points.empty()) {
    out.state = ComponentState::Crossed;
  } else if (out.min_gap <= floor) {
    out.state = ComponentState::Touched;
  }
  return out;
}

const char* to_string(ComponentState s) {
  switch (s) {
    case ComponentState::Avoided: return "avoided";
    case ComponentState::Crossed: return "crossed";
    case ComponentState::Touched: return "touched";
  }
  return "?";
}

std::optional<std::pair<std::size_t, std::size_t>> bifurcation_span(const std::vector<double>& im_gap,
                                                                     const ClassifyOptions& o) {
  const std::size_t n = im_gap.size();
  const std::size_t tail = std::max<std::size_t>(1, static_cast<std::size_t>(o.baseline_fraction * n));
  std::vector<double> outer;
  for (std::size_t k = 0; k < tail; ++k) {
    outer.push_back(im_gap[k]);
    outer.push_back(im_gap[n - 1 - k]);
  }
  const auto mid = outer.begin() + static_cast<std::ptrdiff_t>(outer.size() / 2);
  std::nth_element(outer.begin(), mid, outer.end());
  const double threshold = std::max(o.edge_factor * *mid, o.gap_floor);

  std::optional<std::pair<std::size_t, std::size_t>> span;
  for (std::size_t k = 0; k < n; ++k) {
    if (im_gap[k] <= threshold) continue;
    if (!span) span = std::make_pair(k, k);
    span->second = k;
  }
  return span;
}

}  // namespace

ScanTrajectory match_branches(std::span<const double> ts, std::span<const EigenPair> raw) {
  if (ts.size() != raw.size()) throw Error(errc::kSizeMismatch, "match_branches: ts and raw differ in length");
  if (ts.size() < 3) throw Error(errc::kDomain, "match_branches: need at least 3 scan points");
  for (std::size_t k = 1; k < ts.size(); ++k)
    if (!(ts[k] > ts[k - 1])) throw Error(errc::kDomain, "match_branches: scan values must be strictly increasing");

  ScanTrajectory out;
  out.ts.assign(ts.begin(), ts.end());
  out.branch_a.reserve(ts.size());
  out.branch_b.reserve(ts.size());
  out.branch_a.push_back(raw[0][0]);
  out.branch_b.push_back(raw[0][1]);
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const auto a = out.branch_a.back(), b = out.branch_b.back();
    const auto x = raw[k][0], y = raw[k][1];
    const double keep = std::abs(x - a) + std::abs(y - b);
    const double swap = std::abs(y - a) + std::abs(x - b);
    const double scale = 1.0 + std::abs(a) + std::abs(b);
    if (std::abs(keep - swap) <= 1e-14 * scale) out.ambiguous_points.push_back(k);
    if (swap < keep && std::abs(keep - swap) > 1e-14 * scale) {
      out.branch_a.push_back(y);
      out.branch_b.push_back(x);
    } else {
      out.branch_a.push_back(x);
      out.branch_b.push_back(y);
    }
  }
  return out;
}

std::string to_string(CrossingLabel label) {
  return label == CrossingLabel::LandauZener ? "LZ" : "WB";
}

ClassReport classify(const ScanTrajectory& traj, const ClassifyOptions& options) {
  const std::size_t n = traj.size();
  if (n < 3 || traj.branch_a.size() != n || traj.branch_b.size() != n)
    throw Error(errc::kDomain, "classify: trajectory must have >= 3 matched points");

  std::vector<double> re_d(n), im_d(n), im_gap(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto d = traj.branch_a[k] - traj.branch_b[k];
    re_d[k] = d.real();
    im_d[k] = d.imag();
    im_gap[k] = std::abs(d.imag());
  }
  const ComponentAnalysis re = analyze_component(traj.ts, re_d, options.gap_floor);
  const ComponentAnalysis im = analyze_component(traj.ts, im_d, options.gap_floor);

  ClassReport report;
  report.re_min_gap = re.min_gap;
  report.im_min_gap = im.min_gap;
  report.re_cross_points = re.cross_points;
  report.im_cross_points = im.cross_points;

  const auto span = bifurcation_span(im_gap, options);
  const bool re_avoided = re.state == ComponentState::Avoided;
  const bool im_avoided = im.state == ComponentState::Avoided;

  bool width_bifurcation = im_avoided && !re_avoided;
  // A scan running exactly through both EPs: Re sticks on the whole
  // bifurcation interval, Im opens there and closes outside without
  // changing sign.
  if (!re_avoided && !im_avoided && im.state == ComponentState::Touched && span && span->second > span->first + 1) {
    bool sticks = true;
    for (std::size_t k = span->first + 1; k < span->second && sticks; ++k)
      sticks = std::abs(re_d[k]) <= options.gap_floor;
    width_bifurcation = sticks;
  }

  if (re_avoided && !im_avoided) {
    report.label = CrossingLabel::LandauZener;
  } else if (width_bifurcation) {
    report.label = CrossingLabel::WidthBifurcation;
    if (span) report.bifurcation_edges = std::make_pair(traj.ts[span->first], traj.ts[span->second]);
  } else {
    std::ostringstream os;
    os.precision(6);
    os << "unclassified: Re " << to_string(re.state) << " (min gap " << re.min_gap << ", "
       << re.cross_points.size() << " crossings), Im " << to_string(im.state) << " (min gap " << im.min_gap
       << ", " << im.cross_points.size() << " crossings)";
    throw Error(errc::kUnclassified, os.str());
  }
  return report;
}

std::vector<double> AlphaScan::values() const {
  if (points < 3) throw Error(errc::kDomain, "alpha scan needs at least 3 points");
  if (!(alpha_min >= 0.0) || !(alpha_max > alpha_min) || !std::isfinite(alpha_max))
    throw Error(errc::kDomain, "alpha scan must satisfy 0 <= alpha_min < alpha_max");
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) v[static_cast<std::size_t>(k)] = alpha_min + (alpha_max - alpha_min) * k / (points - 1);
  return v;
}

ScanTrajectory ToyScan::trajectory() const {
  std::vector<EigenPair> raw(spectra.size());
  std::transform(spectra.begin(), spectra.end(), raw.begin(),
                 [](const Spectrum2<double>& s) { return EigenPair{s.lambda_plus, s.lambda_minus}; });
  return match_branches(alphas, raw);
}

ToyScan toy_scan(const ToyParams& p, const AlphaScan& scan, int threads) {
  p.validate();
  ToyScan out;
  out.alphas = scan.values();
  out.spectra.resize(out.alphas.size());
  parallel_for(out.alphas.size(), threads,
               [&](std::size_t k) { out.spectra[k] = diagonalize(build_hamiltonian(out.alphas[k], p)); });
  return out;
}

double beta_transition(ToyParams p, std::pair<double, double> beta_window, const AlphaScan& scan,
                       const ClassifyOptions& options, double resolution) {
  auto [lo, hi] = beta_window;
  if (!(lo >= 0.0) || !(hi <= 1.0) || !(hi > lo))
    throw Error(errc::kDomain, "beta_transition: window must satisfy 0 <= lo < hi <= 1");
  auto label_at = [&](double beta) {
    p.beta = beta;
    return classify(toy_scan(p, scan).trajectory(), options).label;
  };
  const CrossingLabel lo_label = label_at(lo);
  if (label_at(hi) == lo_label)
    throw Error(errc::kNoTransition, "no transition in window: both ends classify as " + to_string(lo_label));
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (label_at(mid) == lo_label ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> overlap_profile(std::span<const Spectrum2<double>> spectra) {
  std::vector<double> out(spectra.size());
  for (std::size_t k = 0; k < spectra.size(); ++k) out[k] = overlap(spectra[k].v_plus, spectra[k].v_minus);
  return out;
}

std::vector<double> entropy_profile(std::span<const Spectrum2<double>> spectra) {
  std::vector<double> out(spectra.size());
  for (std::size_t k = 0; k < spectra.size(); ++k)
    out[k] = shannon_entropy(DiscreteField<double>::uniform(spectra[k].v_plus));
  return out;
}

std::vector<double> profile_peaks(std::span<const double> ts, std::span<const double> values, double min_height,
                                  double flat_tolerance) {
  std::vector<double> peaks;
  const std::size_t n = values.size();
  std::size_t k = 1;
  while (k + 1 < n) {
    // Extend over a flat run so plateaus count once. Rounding noise on a
    // saturated profile must not split the run.
    const double tol = flat_tolerance * std::max(1.0, std::abs(values[k]));
    std::size_t end = k;
    while (end + 1 < n && std::abs(values[end + 1] - values[k]) <= tol) ++end;
    if (end + 1 < n && values[k] > values[k - 1] + tol && values[k] > values[end + 1] + tol && values[k] > min_height)
      peaks.push_back(0.5 * (ts[k] + ts[end]));
    k = end + 1;
  }
  return peaks;
}

std::vector<double> overlap_peaks(std::span<const double> ts, std::span<const Spectrum2<double>> spectra,
                                  double min_height) {
  const std::vector<double> profile = overlap_profile(spectra);
  return profile_peaks(ts, profile, min_height);
}

}  // namespace nhep
