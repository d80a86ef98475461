#include "nhep/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "nhep/parallel.hpp"

namespace nhep {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  return v;
}

// Order (x, y) to best continue (a, b).
EigenPair continue_pair(const EigenPair& from, const EigenPair& to) {
  const double keep = std::abs(to[0] - from[0]) + std::abs(to[1] - from[1]);
  const double swap = std::abs(to[1] - from[0]) + std::abs(to[0] - from[1]);
  return swap < keep ? EigenPair{to[1], to[0]} : to;
}

int sign_of(double v, double zero) { return v > zero ? 1 : (v < -zero ? -1 : 0); }

double median_of(std::vector<double>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::array<double, 2> SheetGrid::edge_midpoint(const GridEdge& e) const {
  const auto i = static_cast<std::size_t>(e.i), j = static_cast<std::size_t>(e.j);
  if (e.vertical) return {axis1[i], 0.5 * (axis2[j] + axis2[j + 1])};
  return {0.5 * (axis1[i] + axis1[i + 1]), axis2[j]};
}

SheetGrid build_surface(const PairSampler& sampler, const Window& window, const SurfaceOptions& options) {
  window.validate();
  if (options.n1 < 16 || options.n2 < 16) throw Error(errc::kDomain, "build_surface: grid must be at least 16x16");
  const int n1 = options.n1, n2 = options.n2;

  SheetGrid grid;
  grid.axis1 = linspace(window.p1_min, window.p1_max, n1);
  grid.axis2 = linspace(window.p2_min, window.p2_max, n2);
  grid.delta_mode = options.delta_mode;
  grid.sheet1 = Eigen::MatrixXcd::Zero(n1, n2);
  grid.sheet2 = Eigen::MatrixXcd::Zero(n1, n2);
  grid.missing = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n1, n2, false);

  std::vector<EigenPair> raw(static_cast<std::size_t>(n1) * n2);
  std::vector<char> failed(raw.size(), 0);
  parallel_for(raw.size(), options.threads, [&](std::size_t k) {
    const int i = static_cast<int>(k % n1), j = static_cast<int>(k / n1);
    try {
      EigenPair e = sampler(grid.axis1[static_cast<std::size_t>(i)], grid.axis2[static_cast<std::size_t>(j)]);
      if (!is_finite(e[0]) || !is_finite(e[1])) throw Error(errc::kDomain, "non-finite sample");
      if (options.delta_mode == DeltaMode::RelativeToMean) {
        const std::complex<double> half = (e[0] - e[1]) / 2.0;
        e = {half, -half};
      }
      raw[k] = e;
    } catch (const std::exception&) {
      failed[k] = 1;
    }
  });
  const auto n_missing = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  if (static_cast<double>(n_missing) > options.max_missing_fraction * static_cast<double>(raw.size())) {
    std::ostringstream os;
    os << "build_surface: " << n_missing << " of " << raw.size() << " samples failed";
    throw Error(errc::kTooManyMissing, os.str());
  }

  auto idx = [n1](int i, int j) { return static_cast<std::size_t>(j) * n1 + static_cast<std::size_t>(i); };
  // Row-major continuation: row 0 left to right, later rows from the cell
  // above, falling back to the left neighbour when that one is missing.
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t k = idx(i, j);
      if (failed[k]) {
        grid.missing(i, j) = true;
        continue;
      }
      const EigenPair* ref = nullptr;
      EigenPair above, left;
      if (j > 0 && !failed[idx(i, j - 1)]) {
        above = {grid.sheet1(i, j - 1), grid.sheet2(i, j - 1)};
        ref = &above;
      } else if (i > 0 && !failed[idx(i - 1, j)]) {
        left = {grid.sheet1(i - 1, j), grid.sheet2(i - 1, j)};
        ref = &left;
      }
      const EigenPair e = ref ? continue_pair(*ref, raw[k]) : raw[k];
      grid.sheet1(i, j) = e[0];
      grid.sheet2(i, j) = e[1];
    }
  }

  // Per-edge jumps of the continued sheets, and component sign changes of
  // the locally continued difference.
  const double scale = std::max(grid.sheet1.cwiseAbs().maxCoeff(), grid.sheet2.cwiseAbs().maxCoeff());
  const double zero = 1e-13 * std::max(scale, 1e-300);
  Eigen::ArrayXXd jump_h = Eigen::ArrayXXd::Constant(n1, n2, -1.0);
  Eigen::ArrayXXd jump_v = Eigen::ArrayXXd::Constant(n1, n2, -1.0);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> swapped_h =
      Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n1, n2, false);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> swapped_v = swapped_h;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      for (bool vertical : {false, true}) {
        const int i2 = vertical ? i : i + 1, j2 = vertical ? j + 1 : j;
        if (i2 >= n1 || j2 >= n2 || grid.missing(i, j) || grid.missing(i2, j2)) continue;
        const EigenPair p{grid.sheet1(i, j), grid.sheet2(i, j)};
        const EigenPair q{grid.sheet1(i2, j2), grid.sheet2(i2, j2)};
        const double jump = std::max(std::abs(q[0] - p[0]), std::abs(q[1] - p[1]));
        (vertical ? jump_v : jump_h)(i, j) = jump;

        const EigenPair qc = continue_pair(p, q);
        // The labels disagree with nearest matching across this edge.
        (vertical ? swapped_v : swapped_h)(i, j) = qc[0] != q[0] && std::abs(q[0] - q[1]) > zero;
        const std::complex<double> dp = p[0] - p[1], dq = qc[0] - qc[1];
        if (sign_of(dp.real(), zero) != sign_of(dq.real(), zero)) grid.re_cut_edges.push_back({i, j, vertical});
        if (sign_of(dp.imag(), zero) != sign_of(dq.imag(), zero)) grid.im_cut_edges.push_back({i, j, vertical});
      }
    }
  }

  const int r = options.median_radius;
  std::vector<double> block;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      for (bool vertical : {false, true}) {
        const Eigen::ArrayXXd& jumps = vertical ? jump_v : jump_h;
        const double jump = jumps(i, j);
        if (jump < 0.0) continue;
        block.clear();
        for (int jj = std::max(0, j - r); jj <= std::min(n2 - 1, j + r); ++jj)
          for (int ii = std::max(0, i - r); ii <= std::min(n1 - 1, i + r); ++ii)
            if (jumps(ii, jj) >= 0.0) block.push_back(jumps(ii, jj));
        const double local = median_of(block);
        const bool swapped = (vertical ? swapped_v : swapped_h)(i, j);
        if (swapped || (jump > options.cut_factor * local && jump > zero)) grid.cut_cells.push_back({i, j, vertical});
      }
    }
  }
  return grid;
}

std::vector<CutComponent> cut_components(const SheetGrid& grid, std::span<const GridEdge> edges) {
  const int n1 = grid.n1(), n2 = grid.n2();
  // Cells are indexed by their lower-left node; an edge bounds up to two.
  std::map<std::pair<int, int>, std::vector<std::size_t>> by_cell;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const GridEdge& e = edges[k];
    if (e.vertical) {
      if (e.i > 0) by_cell[{e.i - 1, e.j}].push_back(k);
      if (e.i < n1 - 1) by_cell[{e.i, e.j}].push_back(k);
    } else {
      if (e.j > 0) by_cell[{e.i, e.j - 1}].push_back(k);
      if (e.j < n2 - 1) by_cell[{e.i, e.j}].push_back(k);
    }
  }
  DisjointSet sets(edges.size());
  for (const auto& [cell, members] : by_cell)
    for (std::size_t m = 1; m < members.size(); ++m) sets.unite(members[0], members[m]);

  std::map<std::size_t, CutComponent> groups;
  for (std::size_t k = 0; k < edges.size(); ++k) groups[sets.find(k)].edges.push_back(edges[k]);

  std::vector<CutComponent> out;
  for (auto& [root, comp] : groups) {
    // Endpoints: farthest pair measured in grid-index units.
    auto index_pos = [](const GridEdge& e) {
      return std::array<double, 2>{e.i + (e.vertical ? 0.0 : 0.5), e.j + (e.vertical ? 0.5 : 0.0)};
    };
    std::size_t a = 0, b = 0;
    double best = -1.0;
    for (std::size_t x = 0; x < comp.edges.size(); ++x) {
      const auto px = index_pos(comp.edges[x]);
      for (std::size_t y = x; y < comp.edges.size(); ++y) {
        const auto py = index_pos(comp.edges[y]);
        const double d = std::hypot(px[0] - py[0], px[1] - py[1]);
        if (d > best) {
          best = d;
          a = x;
          b = y;
        }
      }
    }
    comp.endpoints = {grid.edge_midpoint(comp.edges[a]), grid.edge_midpoint(comp.edges[b])};
    comp.touches_boundary = std::any_of(comp.edges.begin(), comp.edges.end(), [&](const GridEdge& e) {
      const auto p = index_pos(e);
      return p[0] <= 1.0 || p[0] >= n1 - 2.0 || p[1] <= 1.0 || p[1] >= n2 - 2.0;
    });
    out.push_back(std::move(comp));
  }
  std::sort(out.begin(), out.end(), [](const CutComponent& x, const CutComponent& y) {
    return std::make_pair(x.edges.front().j, x.edges.front().i) < std::make_pair(y.edges.front().j, y.edges.front().i);
  });
  return out;
}

// --- loops -----------------------------------------------------------------

std::array<double, 2> loop_point(const Loop& loop, double s) {
  if (const auto* c = std::get_if<Circle>(&loop)) {
    const double phi = 2.0 * kPi * s;
    return {c->center1 + c->radius * std::cos(phi), c->center2 + c->radius * std::sin(phi)};
  }
  const auto& v = std::get<Polyline>(loop).vertices;
  if (v.size() < 3) throw Error(errc::kDomain, "polyline loop needs at least 3 vertices");
  std::vector<double> cumulative{0.0};
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto& a = v[k];
    const auto& b = v[(k + 1) % v.size()];
    cumulative.push_back(cumulative.back() + std::hypot(b[0] - a[0], b[1] - a[1]));
  }
  if (s <= 0.0 || s >= 1.0) return v.front();
  const double target = s * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  const auto seg = static_cast<std::size_t>(it - cumulative.begin()) - 1;
  const auto& a = v[seg];
  const auto& b = v[(seg + 1) % v.size()];
  const double len = cumulative[seg + 1] - cumulative[seg];
  const double t = len > 0.0 ? (target - cumulative[seg]) / len : 0.0;
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

int winding_number(const Loop& loop, double p1, double p2) {
  if (const auto* c = std::get_if<Circle>(&loop))
    return std::hypot(p1 - c->center1, p2 - c->center2) < std::abs(c->radius) ? 1 : 0;
  const auto& v = std::get<Polyline>(loop).vertices;
  int wn = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto& a = v[k];
    const auto& b = v[(k + 1) % v.size()];
    const double cross = (b[0] - a[0]) * (p2 - a[1]) - (p1 - a[0]) * (b[1] - a[1]);
    if (a[1] <= p2) {
      if (b[1] > p2 && cross > 0) ++wn;
    } else if (b[1] <= p2 && cross < 0) {
      --wn;
    }
  }
  return wn;
}

Permutation compose(Permutation a, Permutation b) { return a == b ? Permutation::Identity : Permutation::Swap; }

std::string to_string(Permutation p) { return p == Permutation::Identity ? "identity" : "swap"; }

LoopResult encircle(const PairSampler& sampler, const Loop& loop, const EncircleOptions& options) {
  if (options.n_steps < 64) throw Error(errc::kDomain, "encircle: n_steps must be >= 64");
  if (const auto* c = std::get_if<Circle>(&loop); c && !(c->radius > 0.0))
    throw Error(errc::kDomain, "encircle: circle radius must be positive");

  auto sample = [&](double s) {
    const auto p = loop_point(loop, s);
    return sampler(p[0], p[1]);
  };
  const EigenPair start = sample(0.0);
  EigenPair cur = start;

  LoopResult result;
  result.min_gap = std::abs(cur[0] - cur[1]);
  const double base_step = 1.0 / options.n_steps;
  double s = 0.0, h = base_step;
  while (s < 1.0) {
    const double s_next = std::min(1.0, s + h);
    const EigenPair next = continue_pair(cur, sample(s_next));
    const double gap = std::abs(cur[0] - cur[1]);
    const double jump = std::max(std::abs(next[0] - cur[0]), std::abs(next[1] - cur[1]));
    if (jump > options.jump_factor * gap) {
      h *= 0.5;
      if (h < options.min_step) {
        std::ostringstream os;
        os.precision(6);
        const auto p = loop_point(loop, s);
        os << "loop too close to EP near (" << p[0] << ", " << p[1] << "), gap " << gap;
        throw Error(errc::kLoopTooClose, os.str());
      }
      continue;
    }
    cur = next;
    s = s_next;
    ++result.n_steps;
    result.max_step_jump = std::max(result.max_step_jump, jump);
    result.min_gap = std::min(result.min_gap, std::abs(cur[0] - cur[1]));
    h = std::min(base_step, 2.0 * h);
  }

  const double tol = options.closure_tolerance * (1.0 + std::abs(start[0]) + std::abs(start[1]));
  if (std::abs(cur[0] - start[0]) <= tol && std::abs(cur[1] - start[1]) <= tol) {
    result.permutation = Permutation::Identity;
  } else if (std::abs(cur[0] - start[1]) <= tol && std::abs(cur[1] - start[0]) <= tol) {
    result.permutation = Permutation::Swap;
  } else {
    throw Error(errc::kLoopNotClosed, "encircle: continued pair does not return to the starting set");
  }
  for (const EpLocation& ep : options.known_eps)
    if (winding_number(loop, ep.p1, ep.p2) != 0) result.enclosed_eps.push_back(ep);
  return result;
}

// --- analytic oracle ----------------------------------------------------------

void validate(const AnalyticOracle& oracle) {
  if (const auto* t = std::get_if<TwoPointOracle>(&oracle)) {
    if (!is_finite(t->z1) || !is_finite(t->z2)) throw Error(errc::kDomain, "oracle: branch points must be finite");
    if (t->z1 == t->z2) throw Error(errc::kDomain, "oracle: two-point kind needs z1 != z2");
  } else {
    const auto& s = std::get<SinglePointOracle>(oracle);
    if (!is_finite(s.z0)) throw Error(errc::kDomain, "oracle: branch point must be finite");
    if (s.order < 2) throw Error(errc::kDomain, "oracle: order must be >= 2");
  }
}

std::vector<std::complex<double>> oracle_roots(const SinglePointOracle& oracle, std::complex<double> z) {
  const std::complex<double> w = z - oracle.z0;
  const double r = std::pow(std::abs(w), 1.0 / oracle.order);
  const double theta = std::arg(w);
  std::vector<std::complex<double>> roots;
  for (int k = 0; k < oracle.order; ++k) roots.push_back(std::polar(r, (theta + 2.0 * kPi * k) / oracle.order));
  return roots;
}

OracleValue oracle_eval(const AnalyticOracle& oracle, std::complex<double> z) {
  validate(oracle);
  if (const auto* t = std::get_if<TwoPointOracle>(&oracle)) {
    if (z == t->z1 || z == t->z2) return {{}, {}, true};
    const std::complex<double> f = principal_sqrt((z - t->z1) * (z - t->z2));
    return {f, -f, false};
  }
  const auto& s = std::get<SinglePointOracle>(oracle);
  if (z == s.z0) return {{}, {}, true};
  const auto roots = oracle_roots(s, z);
  return {roots[0], roots[1], false};
}

PairSampler oracle_sampler(const AnalyticOracle& oracle) {
  validate(oracle);
  if (const auto* s = std::get_if<SinglePointOracle>(&oracle); s && s->order != 2)
    throw Error(errc::kDomain, "oracle sampler needs a pair-valued oracle (order 2)");
  return [oracle](double p1, double p2) -> EigenPair {
    const OracleValue v = oracle_eval(oracle, {p1, p2});
    return {v.first, v.second};
  };
}

}  // namespace nhep
