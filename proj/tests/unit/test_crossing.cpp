#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nhep/crossing.hpp"
#include "nhep/ep_finder.hpp"

using cd = std::complex<double>;
using nhep::ToyParams;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  return v;
}

nhep::ClassReport classify_toy(const ToyParams& p, int points = 2001) {
  return nhep::classify(nhep::toy_scan(p, nhep::AlphaScan{0.0, 2.0, points}).trajectory());
}

}  // namespace

TEST_CASE("constant branches keep their order") {
  const auto ts = grid(0, 1, 11);
  std::vector<nhep::EigenPair> raw(ts.size(), nhep::EigenPair{cd(1, 0), cd(0, 2)});
  const auto traj = nhep::match_branches(ts, raw);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    CHECK(traj.branch_a[k] == cd(1, 0));
    CHECK(traj.branch_b[k] == cd(0, 2));
  }
  CHECK(traj.ambiguous_points.empty());
}

TEST_CASE("matching undoes label swaps of a smooth pair") {
  const auto ts = grid(-1, 1, 401);
  std::vector<nhep::EigenPair> raw;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const cd r = std::sqrt(cd(ts[k], 0.01));
    raw.push_back(k % 3 == 0 ? nhep::EigenPair{-r, r} : nhep::EigenPair{r, -r});
  }
  const auto traj = nhep::match_branches(ts, raw);
  const double spacing = ts[1] - ts[0];
  double max_jump = 0;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    max_jump = std::max(max_jump, std::abs(traj.branch_a[k] - traj.branch_a[k - 1]));
    const cd exact = std::sqrt(cd(ts[k], 0.01));
    CHECK(std::min(std::abs(traj.branch_a[k] - exact), std::abs(traj.branch_a[k] + exact)) < 1e-15);
    CHECK(std::abs(traj.branch_a[k] + traj.branch_b[k]) < 1e-15);
  }
  // The branch-point neighborhood has slope ~ 1/(2 sqrt(0.01)) = 5.
  CHECK(max_jump < 10.0 * spacing);
}

TEST_CASE("ambiguous points are flagged") {
  const auto ts = grid(0, 1, 5);
  std::vector<nhep::EigenPair> raw(ts.size(), nhep::EigenPair{cd(1, 0), cd(2, 0)});
  raw[2] = {cd(1.5, 0), cd(1.5, 0)};
  const auto traj = nhep::match_branches(ts, raw);
  // The coincident point and its successor (equidistant from both) are flagged.
  REQUIRE(traj.ambiguous_points.size() >= 1);
  CHECK(traj.ambiguous_points[0] == 2);
}

TEST_CASE("malformed scans are rejected") {
  std::vector<nhep::EigenPair> raw(3);
  const std::vector<double> dup{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(nhep::match_branches(dup, raw), nhep::Error);
  const std::vector<double> short_ts{0.0, 1.0};
  CHECK_THROWS_AS(nhep::match_branches(short_ts, std::span<const nhep::EigenPair>(raw.data(), 2)), nhep::Error);
}

TEST_CASE("toy scan stays continuous through both EPs") {
  const ToyParams p{0.05, 1.0, 1.05, 1.05};
  const auto coarse = nhep::toy_scan(p, nhep::AlphaScan{0.3, 0.8, 501}).trajectory();
  const auto fine = nhep::toy_scan(p, nhep::AlphaScan{0.3, 0.8, 1001}).trajectory();
  // Refining the step leaves the matched branches unchanged on the shared nodes.
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    const double d = std::min(std::abs(coarse.branch_a[k] - fine.branch_a[2 * k]),
                              std::abs(coarse.branch_a[k] - fine.branch_b[2 * k]));
    CHECK(d < 1e-12);
  }
}

TEST_CASE("real coupling gives Landau-Zener") {
  const auto r = classify_toy(ToyParams{0.043, 0.0, 1.05, 1.07});
  CHECK(r.label == nhep::CrossingLabel::LandauZener);
  CHECK(r.re_min_gap > 1e-3);
  REQUIRE(r.im_cross_points.size() >= 1);
  const double center = (std::sqrt(3.0) - 1) * (std::sqrt(3.0) - 1);
  CHECK(std::abs(r.im_cross_points[0] - center) < 0.05);
}

TEST_CASE("pure imaginary coupling gives width bifurcation with edges at the EPs") {
  const ToyParams p{0.05, 1.0, 1.05, 1.05};
  const auto r = classify_toy(p);
  CHECK(r.label == nhep::CrossingLabel::WidthBifurcation);
  REQUIRE(r.bifurcation_edges);
  const auto roots = nhep::toy_ep_roots(p, {0.0, 2.0});
  REQUIRE(roots.size() == 2);
  CHECK(std::abs(r.bifurcation_edges->first - roots[0].p1) < 0.01);
  CHECK(std::abs(r.bifurcation_edges->second - roots[1].p1) < 0.01);

  const auto ts = nhep::toy_scan(p, nhep::AlphaScan{}).trajectory();
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (ts.ts[k] > r.bifurcation_edges->first && ts.ts[k] < r.bifurcation_edges->second)
      CHECK(std::abs(ts.branch_a[k].real() - ts.branch_b[k].real()) < 1e-9);
  }
}

TEST_CASE("reference crossing classes") {
  const std::vector<std::pair<std::string, nhep::CrossingLabel>> expected{
      {"class1", nhep::CrossingLabel::LandauZener},      {"class2", nhep::CrossingLabel::WidthBifurcation},
      {"class3a", nhep::CrossingLabel::WidthBifurcation}, {"class3b", nhep::CrossingLabel::WidthBifurcation},
      {"class4", nhep::CrossingLabel::WidthBifurcation}, {"class5", nhep::CrossingLabel::LandauZener}};
  for (const auto& [name, label] : expected) {
    CAPTURE(name);
    CHECK(classify_toy(nhep::toy_preset(name)->params).label == label);
    CHECK(classify_toy(nhep::toy_preset(name)->params, 4001).label == label);
  }
}

TEST_CASE("labels print as LZ and WB") {
  CHECK(nhep::to_string(nhep::CrossingLabel::LandauZener) == "LZ");
  CHECK(nhep::to_string(nhep::CrossingLabel::WidthBifurcation) == "WB");
}

TEST_CASE("unclassifiable trajectory") {
  // Two branches crossing in both components at the same point.
  const auto ts = grid(-1, 1, 101);
  std::vector<nhep::EigenPair> raw;
  for (double t : ts) raw.push_back({cd(t, t), cd(-t, -t)});
  CHECK_THROWS_AS(nhep::classify(nhep::match_branches(ts, raw)), nhep::Error);
  try {
    nhep::classify(nhep::match_branches(ts, raw));
  } catch (const nhep::Error& e) {
    CHECK(e.code() == nhep::errc::kUnclassified);
  }
}

TEST_CASE("beta transition window") {
  const ToyParams p{0.043, 0.76, 1.05, 1.07};
  const double bc = nhep::beta_transition(p, {0.7, 0.85});
  CHECK(bc >= 0.76);
  CHECK(bc <= 0.78);
  const double bc_fine = nhep::beta_transition(p, {0.7, 0.85}, nhep::AlphaScan{0.0, 2.0, 4001});
  CHECK(std::abs(bc - bc_fine) < 1e-3);
  try {
    nhep::beta_transition(p, {0.0, 0.1});
    FAIL("expected no transition");
  } catch (const nhep::Error& e) {
    CHECK(e.code() == nhep::errc::kNoTransition);
  }
}

TEST_CASE("overlap peaks at the EPs") {
  const ToyParams p{0.05, 1.0, 1.05, 1.05};
  const auto scan = nhep::toy_scan(p, nhep::AlphaScan{});
  const auto peaks = nhep::overlap_peaks(scan.alphas, scan.spectra);
  REQUIRE(peaks.size() == 2);
  CHECK(std::abs(peaks[0] - 0.454) < 0.01);
  CHECK(std::abs(peaks[1] - 0.621) < 0.01);
}

TEST_CASE("overlap peaks once for real coupling") {
  const auto scan = nhep::toy_scan(ToyParams{0.043, 0.0, 1.05, 1.07}, nhep::AlphaScan{});
  const auto peaks = nhep::overlap_peaks(scan.alphas, scan.spectra);
  REQUIRE(peaks.size() == 1);
  const double center = (std::sqrt(3.0) - 1) * (std::sqrt(3.0) - 1);
  CHECK(std::abs(peaks[0] - center) < 0.05);
}

TEST_CASE("decoupled system has no overlap peaks") {
  std::vector<double> ts = grid(0, 2, 201);
  std::vector<nhep::Spectrum2<double>> spectra;
  for (double a : ts) spectra.push_back(nhep::diagonalize(nhep::Hamiltonian2<double>{1.0 - a / 2, std::sqrt(a), 0.0}));
  CHECK(nhep::overlap_peaks(ts, spectra).empty());
}

TEST_CASE("entropy peaks follow overlap peaks for real coupling") {
  const auto scan = nhep::toy_scan(ToyParams{0.043, 0.0, 1.05, 1.07}, nhep::AlphaScan{});
  const auto ov = nhep::overlap_peaks(scan.alphas, scan.spectra);
  const auto ent = nhep::profile_peaks(scan.alphas, nhep::entropy_profile(scan.spectra), 1e-6);
  REQUIRE(ov.size() == 1);
  REQUIRE(ent.size() == 1);
  CHECK(std::abs(ov[0] - ent[0]) <= scan.alphas[1] - scan.alphas[0] + 1e-12);
}

TEST_CASE("entropy saturates between the EPs for imaginary coupling") {
  // Between the EPs both eigenvector components have equal magnitude, so the
  // entropy sits at log 2 on the whole interval; its edges meet the overlap peaks.
  const auto scan = nhep::toy_scan(ToyParams{0.05, 1.0, 1.05, 1.05}, nhep::AlphaScan{});
  const auto ov = nhep::overlap_peaks(scan.alphas, scan.spectra);
  const auto ent = nhep::entropy_profile(scan.spectra);
  REQUIRE(ov.size() == 2);
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t k = 0; k < ent.size(); ++k) {
    CHECK(ent[k] <= std::log(2.0) + 1e-12);
    if (ent[k] > std::log(2.0) - 1e-9) lo = std::min(lo, scan.alphas[k]), hi = std::max(hi, scan.alphas[k]);
  }
  const double step = scan.alphas[1] - scan.alphas[0];
  CHECK(std::abs(lo - ov[0]) <= step + 1e-12);
  CHECK(std::abs(hi - ov[1]) <= step + 1e-12);
}

TEST_CASE("plateau peaks report the midpoint") {
  const std::vector<double> ts{0, 1, 2, 3, 4, 5};
  const std::vector<double> v{0, 1, 3, 3, 1, 0};
  const auto peaks = nhep::profile_peaks(ts, v, 1e-6);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0] == 2.5);
}

TEST_CASE("rounding noise on a plateau does not split it") {
  const std::vector<double> ts{0, 1, 2, 3, 4, 5, 6};
  const std::vector<double> v{0, 1, 2 + 1e-15, 2, 2 + 2e-15, 1, 0};
  const auto peaks = nhep::profile_peaks(ts, v, 1e-6);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0] == 3.0);
}

TEST_CASE("entropy plateau at imaginary coupling is one peak") {
  const auto scan = nhep::toy_scan(ToyParams{0.05, 1.0, 1.05, 1.05}, nhep::AlphaScan{});
  const auto ov = nhep::overlap_peaks(scan.alphas, scan.spectra);
  const auto ent = nhep::profile_peaks(scan.alphas, nhep::entropy_profile(scan.spectra), 1e-6);
  REQUIRE(ov.size() == 2);
  REQUIRE(ent.size() == 1);
  CHECK(ent[0] > ov[0]);
  CHECK(ent[0] < ov[1]);
}
