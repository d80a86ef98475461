#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nhep/ep_finder.hpp"
#include "nhep/surface.hpp"

using cd = std::complex<double>;
using nhep::ToyParams;

namespace {

const ToyParams kDoubleEp{0.05, 1.0, 1.05, 1.05};

double residual_at(const nhep::PairSampler& s, double p1, double p2) {
  const auto v = s(p1, p2);
  return std::abs(v[0] - v[1]);
}

}  // namespace

TEST_CASE("double-EP roots on the reference bracket") {
  const auto roots = nhep::toy_ep_roots(kDoubleEp, {0.3, 0.8});
  REQUIRE(roots.size() == 2);
  CHECK(std::abs(roots[0].p1 - 0.454) < 1e-3);
  CHECK(std::abs(roots[1].p1 - 0.621) < 1e-3);
  for (const auto& r : roots) {
    CHECK(r.p2 == 1.0);
    CHECK(r.order == 2);
    const auto s = nhep::diagonalize(nhep::build_hamiltonian(r.p1, kDoubleEp));
    CHECK(std::norm(s.eta) < 1e-10);
    CHECK(std::abs(r.residual - std::abs(s.lambda_plus - s.lambda_minus)) < 1e-12);
  }
}

TEST_CASE("real coupling with equal widths has no roots") {
  CHECK(nhep::toy_ep_roots(ToyParams{0.05, 0.0, 1.05, 1.05}, {0.0, 2.0}).empty());
}

TEST_CASE("root level spacing matches a brute-force scan of the transcendental condition") {
  // With beta = 1 and equal widths the roots satisfy d^2 exp(2 d^2) = 4 g_c^2,
  // d = Re(xi1 - xi2). Scan d on a 1e-6 lattice.
  double best_d = 0.0, best = INFINITY;
  for (int k = 0; k <= 1000000; ++k) {
    const double d = k * 1e-6;
    const double f = std::abs(d * d * std::exp(2 * d * d) - 4 * 0.05 * 0.05);
    if (f < best) best = f, best_d = d;
  }
  CHECK(best_d == doctest::Approx(0.0990).epsilon(1e-3));
  for (const auto& r : nhep::toy_ep_roots(kDoubleEp, {0.3, 0.8})) {
    const auto x = nhep::xi(r.p1, kDoubleEp);
    CHECK(std::abs(std::abs(x.xi1.real() - x.xi2.real()) - best_d) < 2e-6);
  }
}

TEST_CASE("empty bracket result and invalid bracket") {
  CHECK(nhep::toy_ep_roots(kDoubleEp, {1.0, 2.0}).empty());
  CHECK_THROWS_AS(nhep::toy_ep_roots(kDoubleEp, {0.8, 0.3}), nhep::Error);
  CHECK_THROWS_AS(nhep::toy_ep_roots(kDoubleEp, {-0.5, 0.3}), nhep::Error);
}

TEST_CASE("grid search on the toy plane") {
  const nhep::Window w{0.3, 0.8, 0.9, 1.0};
  const auto res = nhep::grid_ep_search(nhep::toy_plane_sampler(kDoubleEp), w);
  REQUIRE(res.eps.size() == 2);
  const auto roots = nhep::toy_ep_roots(kDoubleEp, {0.3, 0.8});
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(res.eps[k].p1 - roots[k].p1) < 1e-4);
    CHECK(std::abs(res.eps[k].p2 - 1.0) < 1e-4);
    CHECK(res.eps[k].residual <= res.tolerance);
    CHECK(residual_at(nhep::toy_plane_sampler(kDoubleEp), res.eps[k].p1, res.eps[k].p2) <= res.tolerance);
  }
}

TEST_CASE("grid search recovers the analytic oracle branch points") {
  const nhep::TwoPointOracle oracle{cd(2.6257, 0.601), cd(2.9036, 0.53)};
  const nhep::Window w{2.5, 3.0, 0.4, 0.7};
  const auto res = nhep::grid_ep_search(nhep::oracle_sampler(oracle), w);
  REQUIRE(res.eps.size() == 2);
  CHECK(std::abs(res.eps[0].p1 - 2.6257) < 1e-4);
  CHECK(std::abs(res.eps[0].p2 - 0.601) < 1e-4);
  CHECK(std::abs(res.eps[1].p1 - 2.9036) < 1e-4);
  CHECK(std::abs(res.eps[1].p2 - 0.53) < 1e-4);
}

TEST_CASE("seed perturbation by one coarse cell gives the same root") {
  const nhep::Window w{0.3, 0.8, 0.9, 1.1};
  const auto sampler = nhep::toy_plane_sampler(kDoubleEp);
  const double cell1 = w.width() / 63.0, cell2 = w.height() / 63.0;
  const auto base = nhep::refine_ep_candidate(sampler, w, 0.454, 1.0);
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      const auto e = nhep::refine_ep_candidate(sampler, w, 0.454 + di * cell1, 1.0 + dj * cell2);
      CHECK(std::hypot(e.p1 - base.p1, e.p2 - base.p2) < 1e-5);
    }
  }
}

TEST_CASE("constant gap sampler yields nothing") {
  const nhep::PairSampler flat = [](double, double) { return nhep::EigenPair{cd(0.5, 0), cd(-0.5, 0)}; };
  const auto res = nhep::grid_ep_search(flat, nhep::Window{0, 1, 0, 1});
  CHECK(res.eps.empty());
}

TEST_CASE("shallow avoided crossing is rejected") {
  // Gap has a minimum of 0.05 at the center; no EP.
  const nhep::PairSampler shallow = [](double x, double y) {
    const double half = std::hypot(std::hypot(x - 0.5, y - 0.5), 0.025);
    return nhep::EigenPair{cd(half, 0), cd(-half, 0)};
  };
  const auto res = nhep::grid_ep_search(shallow, nhep::Window{0, 1, 0, 1});
  CHECK(res.eps.empty());
  CHECK(res.rejected >= 1);
}

TEST_CASE("failing sampler points are skipped and counted") {
  const nhep::TwoPointOracle oracle{cd(0.3, 0.5), cd(0.7, 0.5)};
  const auto inner = nhep::oracle_sampler(oracle);
  const nhep::PairSampler flaky = [&](double x, double y) -> nhep::EigenPair {
    if (x < 0.05) throw nhep::Error(nhep::errc::kDomain, "outside model");
    return inner(x, y);
  };
  const auto res = nhep::grid_ep_search(flaky, nhep::Window{0, 1, 0, 1});
  CHECK(res.skipped_points > 0);
  CHECK(res.eps.size() == 2);
}

TEST_CASE("threaded grid search is deterministic") {
  const nhep::Window w{0.3, 0.8, 0.9, 1.1};
  nhep::GridSearchOptions one, four;
  four.threads = 4;
  const auto a = nhep::grid_ep_search(nhep::toy_plane_sampler(kDoubleEp), w, one);
  const auto b = nhep::grid_ep_search(nhep::toy_plane_sampler(kDoubleEp), w, four);
  REQUIRE(a.eps.size() == b.eps.size());
  for (std::size_t k = 0; k < a.eps.size(); ++k) {
    CHECK(a.eps[k].p1 == b.eps[k].p1);
    CHECK(a.eps[k].p2 == b.eps[k].p2);
  }
}
