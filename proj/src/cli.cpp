#include "nhep/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "nhep/crossing.hpp"
#include "nhep/ep_finder.hpp"
#include "nhep/error.hpp"
#include "nhep/io.hpp"
#include "nhep/sphere.hpp"
#include "nhep/surface.hpp"
#include "nhep/toy_model.hpp"

namespace nhep {
namespace {

using json = nlohmann::json;

constexpr double kEp1 = 0.454145383;
constexpr double kEp2 = 0.621430791;
constexpr double kAlphaDomainMax = 4.0;

[[noreturn]] void config_fail(const std::string& what) { throw Error(errc::kConfig, what); }

json window_json(double a, double b, double c, double d) { return {{"p1", {a, b}}, {"p2", {c, d}}}; }

json circle_json(double c1, double c2, double r) {
  return {{"type", "circle"}, {"center", {c1, c2}}, {"radius", r}};
}

json rectangle_json(double a, double b, double c, double d) {
  return {{"type", "polyline"}, {"vertices", {{a, c}, {b, c}, {b, d}, {a, d}}}};
}

json classify_defaults() {
  const ClassifyOptions o;
  return {{"gap_floor", o.gap_floor}, {"edge_factor", o.edge_factor}, {"baseline_fraction", o.baseline_fraction}};
}

json scan_defaults() {
  const AlphaScan s;
  return {{"alpha_min", s.alpha_min}, {"alpha_max", s.alpha_max}, {"points", s.points}};
}

json surface_defaults() {
  const SurfaceOptions o;
  return {{"n1", 256},
          {"n2", 64},
          {"delta_mode", "relative"},
          {"cut_factor", o.cut_factor},
          {"median_radius", o.median_radius},
          {"max_missing_fraction", o.max_missing_fraction}};
}

json encircle_defaults() {
  const EncircleOptions o;
  return {{"n_steps", o.n_steps},
          {"jump_factor", o.jump_factor},
          {"min_step", o.min_step},
          {"closure_tolerance", o.closure_tolerance}};
}

json grid_search_defaults() {
  const GridSearchOptions o;
  return {{"enabled", false},
          {"window", window_json(0.3, 0.8, 0.9, 1.1)},
          {"coarse_n", o.coarse_n},
          {"rel_tolerance", o.rel_tolerance},
          {"accept_factor", o.accept_factor},
          {"median_radius", o.median_radius},
          {"max_evaluations", o.max_evaluations}};
}

json default_params() { return to_json(ToyParams{}); }

json command_defaults(const std::string& command) {
  json j{{"command", command}, {"threads", 1}};
  if (command == "toy-sweep") {
    j["params"] = default_params();
    j["scan"] = scan_defaults();
    j["classify"] = classify_defaults();
    j["peak_min_height"] = 1e-6;
    j["metadata"] = json::object();
  } else if (command == "find-eps") {
    const RootOptions r;
    j["params"] = default_params();
    j["scan"] = scan_defaults();
    j["roots"] = {{"samples", r.samples},
                  {"eta_sq_tolerance", r.eta_sq_tolerance},
                  {"max_iterations", r.max_iterations}};
    j["grid_search"] = grid_search_defaults();
  } else if (command == "surface") {
    j["params"] = default_params();
    j["window"] = window_json(0.3, 0.8, 0.9, 1.1);
    j["surface"] = surface_defaults();
    j["locate_eps"] = true;
  } else if (command == "encircle") {
    j["params"] = default_params();
    j["loop"] = rectangle_json(0.35, 0.72, 0.9, 1.1);
    j["encircle"] = encircle_defaults();
    j["scan"] = scan_defaults();
  } else if (command == "beta-scan") {
    j["params"] = default_params();
    j["beta_window"] = {0.0, 1.0};
    j["scan"] = scan_defaults();
    j["classify"] = classify_defaults();
    j["resolution"] = 1e-4;
  } else if (command == "project") {
    j["eps"] = json::array();
    j["re_cut_points"] = 65;
    j["im_ray_points"] = 64;
    j["im_ray_max_radius"] = 1e6;
  } else if (command == "ingest-classify") {
    j["input"] = "";
    j["modes"] = {0, 1};
    j["classify"] = classify_defaults();
  } else if (command == "oracle") {
    j["task"] = "surface";
    j["oracle"] = {{"type", "two-point"}, {"z1", {kEp1, 1.0}}, {"z2", {kEp2, 1.0}}};
    j["window"] = window_json(0.3, 0.8, 0.9, 1.1);
    j["surface"] = surface_defaults();
    j["loop"] = rectangle_json(0.35, 0.72, 0.9, 1.1);
    j["encircle"] = encircle_defaults();
  } else {
    config_fail("unknown command '" + command + "'");
  }
  return j;
}

std::optional<json> preset_patch(const std::string& command, const std::string& name) {
  const auto presets = command_presets(command);
  if (std::find(presets.begin(), presets.end(), name) == presets.end()) return std::nullopt;

  if (auto toy = toy_preset(name)) {
    json j{{"params", to_json(toy->params)}};
    if (command == "toy-sweep") j["metadata"] = toy->metadata;
    return j;
  }
  const json double_ep = to_json(toy_preset("double-ep")->params);
  if (name == "loop-ep1") return json{{"params", double_ep}, {"loop", circle_json(0.454145, 1.0, 0.05)}};
  if (name == "loop-ep2") return json{{"params", double_ep}, {"loop", circle_json(0.621431, 1.0, 0.05)}};
  if (name == "loop-both") return json{{"params", double_ep}, {"loop", rectangle_json(0.35, 0.72, 0.9, 1.1)}};
  if (name == "class-transition") {
    ToyParams p = toy_preset("class1")->params;
    return json{{"params", to_json(p)}, {"beta_window", {0.7, 0.85}}};
  }
  if (name == "microcavity") return json{{"eps", {{2.6257, 0.6001}, {2.9036, 0.5372}}}};
  if (name == "oracle-surface") return json{{"task", "surface"}};
  if (name == "oracle-loop-ep1") return json{{"task", "loop"}, {"loop", circle_json(0.454145, 1.0, 0.05)}};
  if (name == "oracle-loop-ep2") return json{{"task", "loop"}, {"loop", circle_json(0.621431, 1.0, 0.05)}};
  if (name == "oracle-loop-both") return json{{"task", "loop"}, {"loop", rectangle_json(0.35, 0.72, 0.9, 1.1)}};
  return std::nullopt;
}

// --- typed readers -------------------------------------------------------------

double get_double(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number()) config_fail(std::string(key) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_fail(std::string(key) + " must be finite");
  return d;
}

double get_positive(const json& j, const char* key) {
  const double d = get_double(j, key);
  if (!(d > 0.0)) config_fail(std::string(key) + " must be positive");
  return d;
}

int get_int(const json& j, const char* key, int min_value) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) config_fail(std::string(key) + " must be an integer");
  const auto i = v.get<long long>();
  if (i < min_value || i > 100000000) config_fail(std::string(key) + " out of range");
  return static_cast<int>(i);
}

std::pair<double, double> get_pair(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    config_fail(std::string(key) + " must be a two-number array");
  return {v[0].get<double>(), v[1].get<double>()};
}

ToyParams read_params(const json& config) {
  ToyParams p = toy_params_from_json(config.at("params"));
  p.validate();
  return p;
}

AlphaScan read_scan(const json& config) {
  const json& s = config.at("scan");
  AlphaScan scan{get_double(s, "alpha_min"), get_double(s, "alpha_max"), get_int(s, "points", 3)};
  if (scan.alpha_min < 0.0 || scan.alpha_max > kAlphaDomainMax || !(scan.alpha_min < scan.alpha_max))
    config_fail("scan must satisfy 0 <= alpha_min < alpha_max <= 4");
  return scan;
}

ClassifyOptions read_classify(const json& config) {
  const json& c = config.at("classify");
  return {get_positive(c, "gap_floor"), get_positive(c, "edge_factor"), get_positive(c, "baseline_fraction")};
}

Window read_window(const json& j) {
  const auto [a, b] = get_pair(j, "p1");
  const auto [c, d] = get_pair(j, "p2");
  Window w{a, b, c, d};
  w.validate();
  return w;
}

SurfaceOptions read_surface(const json& config) {
  const json& s = config.at("surface");
  SurfaceOptions o;
  o.n1 = get_int(s, "n1", 16);
  o.n2 = get_int(s, "n2", 16);
  const std::string mode = s.at("delta_mode").get<std::string>();
  if (mode == "raw") {
    o.delta_mode = DeltaMode::Raw;
  } else if (mode == "relative") {
    o.delta_mode = DeltaMode::RelativeToMean;
  } else {
    config_fail("delta_mode must be 'raw' or 'relative'");
  }
  o.cut_factor = get_positive(s, "cut_factor");
  o.median_radius = get_int(s, "median_radius", 1);
  o.max_missing_fraction = get_positive(s, "max_missing_fraction");
  o.threads = get_int(config, "threads", 1);
  return o;
}

Loop read_loop(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "circle") {
    const auto [c1, c2] = get_pair(j, "center");
    return Circle{c1, c2, get_positive(j, "radius")};
  }
  if (type == "polyline") {
    Polyline poly;
    for (const json& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 2) config_fail("polyline vertices must be [p1, p2] pairs");
      poly.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    if (poly.vertices.size() < 3) config_fail("polyline needs at least three vertices");
    return poly;
  }
  config_fail("loop type must be 'circle' or 'polyline'");
}

EncircleOptions read_encircle(const json& config) {
  const json& e = config.at("encircle");
  EncircleOptions o;
  o.n_steps = get_int(e, "n_steps", 64);
  o.jump_factor = get_positive(e, "jump_factor");
  o.min_step = get_positive(e, "min_step");
  o.closure_tolerance = get_positive(e, "closure_tolerance");
  return o;
}

AnalyticOracle read_oracle(const json& j) {
  auto complex_of = [&](const char* key) {
    const auto [re, im] = get_pair(j, key);
    return std::complex<double>(re, im);
  };
  const std::string type = j.at("type").get<std::string>();
  AnalyticOracle oracle;
  if (type == "two-point") {
    oracle = TwoPointOracle{complex_of("z1"), complex_of("z2")};
  } else if (type == "single-point") {
    oracle = SinglePointOracle{complex_of("z0"), get_int(j, "order", 2)};
  } else {
    config_fail("oracle type must be 'two-point' or 'single-point'");
  }
  validate(oracle);
  return oracle;
}

// --- output helpers ----------------------------------------------------------------

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string to_text(const auto& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

json peaks_json(const std::vector<double>& v) { return json(v); }

json sphere_json(const SpherePoint<double>& s) { return {s.tn, s.tchi, s.txi}; }

std::vector<EpLocation> toy_known_eps(const ToyParams& p, const AlphaScan& scan) {
  return toy_ep_roots(p, {scan.alpha_min, scan.alpha_max});
}

// --- commands ------------------------------------------------------------------------

json cmd_toy_sweep(const json& config, const std::filesystem::path& out) {
  const ToyParams p = read_params(config);
  const AlphaScan scan = read_scan(config);
  const ClassifyOptions copt = read_classify(config);
  const double min_height = get_positive(config, "peak_min_height");

  const ToyScan ts = toy_scan(p, scan, get_int(config, "threads", 1));
  const ScanTrajectory traj = ts.trajectory();

  std::map<std::string, std::string> meta{{"scan_name", "alpha"}};
  for (const auto& [k, v] : config.at("metadata").items()) meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
  write_text_file(out / "trajectory.csv", to_text([&](std::ostream& os) { write_trajectory_csv(os, traj, meta); }));

  const ClassReport report = classify(traj, copt);
  const auto entropy = entropy_profile(ts.spectra);
  json r{{"config", config},
         {"report", to_json(report)},
         {"overlap_peaks", peaks_json(overlap_peaks(ts.alphas, ts.spectra, min_height))},
         {"entropy_peaks", peaks_json(profile_peaks(ts.alphas, entropy, min_height))},
         {"ambiguous_points", traj.ambiguous_points.size()},
         {"rows", traj.size()}};
  write_text_file(out / "report.json", dump(r));
  return r;
}

json cmd_find_eps(const json& config, const std::filesystem::path& out) {
  const ToyParams p = read_params(config);
  const AlphaScan scan = read_scan(config);
  const json& rj = config.at("roots");
  const RootOptions ropt{get_int(rj, "samples", 16), get_positive(rj, "eta_sq_tolerance"),
                         get_int(rj, "max_iterations", 1)};

  json eps = json::array();
  for (const auto& e : toy_ep_roots(p, {scan.alpha_min, scan.alpha_max}, ropt)) eps.push_back(to_json(e));
  json r{{"config", config}, {"eps", eps}};

  const json& g = config.at("grid_search");
  if (g.at("enabled").get<bool>()) {
    GridSearchOptions gopt;
    gopt.coarse_n = get_int(g, "coarse_n", 4);
    gopt.rel_tolerance = get_positive(g, "rel_tolerance");
    gopt.accept_factor = get_positive(g, "accept_factor");
    gopt.median_radius = get_int(g, "median_radius", 1);
    gopt.max_evaluations = get_int(g, "max_evaluations", 10);
    gopt.threads = get_int(config, "threads", 1);
    const GridSearchResult gr = grid_ep_search(toy_plane_sampler(p), read_window(g.at("window")), gopt);
    json geps = json::array();
    for (const auto& e : gr.eps) geps.push_back(to_json(e));
    r["grid_search"] = {{"eps", geps},
                        {"candidates", gr.candidates},
                        {"rejected", gr.rejected},
                        {"skipped_points", gr.skipped_points},
                        {"tolerance", gr.tolerance}};
  }
  write_text_file(out / "eps.json", dump(r));
  return r;
}

json cmd_surface_common(const json& config, const PairSampler& sampler, const std::filesystem::path& out,
                        const std::string& stem, json extra) {
  const Window window = read_window(config.at("window"));
  const SheetGrid grid = build_surface(sampler, window, read_surface(config));
  write_text_file(out / (stem + ".csv"), to_text([&](std::ostream& os) { write_surface_csv(os, grid); }));
  json r{{"config", config}, {"surface", surface_summary(grid)}};
  for (auto& [k, v] : extra.items()) r[k] = v;
  write_text_file(out / (stem + ".json"), dump(r));
  return r;
}

json cmd_surface(const json& config, const std::filesystem::path& out) {
  const ToyParams p = read_params(config);
  json extra = json::object();
  if (config.at("locate_eps").get<bool>()) {
    GridSearchOptions gopt;
    gopt.threads = get_int(config, "threads", 1);
    json eps = json::array();
    for (const auto& e : grid_ep_search(toy_plane_sampler(p), read_window(config.at("window")), gopt).eps)
      eps.push_back(to_json(e));
    extra["eps"] = eps;
  }
  return cmd_surface_common(config, toy_plane_sampler(p), out, "surface", extra);
}

json cmd_encircle(const json& config, const std::filesystem::path& out) {
  const ToyParams p = read_params(config);
  EncircleOptions opt = read_encircle(config);
  opt.known_eps = toy_known_eps(p, read_scan(config));
  const LoopResult res = encircle(toy_plane_sampler(p), read_loop(config.at("loop")), opt);
  json r{{"config", config}, {"result", to_json(res)}};
  write_text_file(out / "loop.json", dump(r));
  return r;
}

json cmd_beta_scan(const json& config, const std::filesystem::path& out) {
  const ToyParams p = read_params(config);
  const auto window = get_pair(config, "beta_window");
  if (!(window.first >= 0.0 && window.first < window.second && window.second <= 1.0))
    config_fail("beta_window must satisfy 0 <= lo < hi <= 1");
  const double beta_c =
      beta_transition(p, window, read_scan(config), read_classify(config), get_positive(config, "resolution"));
  json r{{"config", config}, {"beta_c", beta_c}};
  write_text_file(out / "beta.json", dump(r));
  return r;
}

json cmd_project(const json& config, const std::filesystem::path& out) {
  std::vector<PlanePoint<double>> eps;
  for (const json& e : config.at("eps")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      config_fail("eps entries must be [n, chi] pairs");
    eps.push_back({e[0].get<double>(), e[1].get<double>(), false});
  }
  if (eps.empty()) config_fail("project needs at least one EP");
  const auto lifted = lift_cut<double>(eps);
  write_text_file(out / "sphere_eps.csv", to_text([&](std::ostream& os) { write_sphere_csv(os, lifted); }));

  json r{{"config", config}};
  json eps_json = json::array();
  for (std::size_t k = 0; k < eps.size(); ++k)
    eps_json.push_back({{"plane", {eps[k].n, eps[k].chi}}, {"sphere", sphere_json(lifted[k])}});
  r["eps"] = eps_json;

  // With two EPs the canonical cuts are drawn: the Re cut is the segment
  // joining them, each Im cut is the ray leaving its EP away from the other
  // one, closed at the point at infinity.
  if (eps.size() == 2) {
    const int n_seg = get_int(config, "re_cut_points", 2);
    const int n_ray = get_int(config, "im_ray_points", 2);
    const double r_max = get_positive(config, "im_ray_max_radius");
    const double dn = eps[1].n - eps[0].n, dc = eps[1].chi - eps[0].chi;
    const double len = std::hypot(dn, dc);
    if (!(len > 0.0)) config_fail("the two EPs coincide");

    std::vector<PlanePoint<double>> segment;
    for (int k = 0; k < n_seg; ++k) {
      const double t = static_cast<double>(k) / (n_seg - 1);
      segment.push_back({eps[0].n + t * dn, eps[0].chi + t * dc, false});
    }
    const auto seg_sphere = lift_cut<double>(segment);
    double seg_pole_distance = 2.0;
    for (const auto& s : seg_sphere)
      seg_pole_distance = std::min(seg_pole_distance, (s.vector() - Eigen::Vector3d(0, 0, 1)).norm());
    write_text_file(out / "sphere_re_cut.csv", to_text([&](std::ostream& os) { write_sphere_csv(os, seg_sphere); }));

    json rays = json::array();
    for (int which = 0; which < 2; ++which) {
      const double sign = which == 0 ? -1.0 : 1.0;
      const PlanePoint<double>& from = eps[static_cast<std::size_t>(which)];
      std::vector<PlanePoint<double>> ray{from};
      const double r_min = len / n_ray;
      for (int k = 0; k < n_ray; ++k) {
        const double rad = r_min * std::pow(r_max / r_min, static_cast<double>(k) / (n_ray - 1));
        ray.push_back({from.n + sign * rad * dn / len, from.chi + sign * rad * dc / len, false});
      }
      ray.push_back(PlanePoint<double>::infinity());
      const auto ray_sphere = lift_cut<double>(ray);
      const std::string file = "sphere_im_cut_" + std::to_string(which + 1) + ".csv";
      write_text_file(out / file, to_text([&](std::ostream& os) { write_sphere_csv(os, ray_sphere); }));
      const auto& tail = ray_sphere[ray_sphere.size() - 2];
      rays.push_back({{"file", file},
                      {"points", ray_sphere.size()},
                      {"end", sphere_json(ray_sphere.back())},
                      {"last_finite_pole_distance", (tail.vector() - Eigen::Vector3d(0, 0, 1)).norm()}});
    }
    r["re_cut"] = {{"file", "sphere_re_cut.csv"},
                   {"points", seg_sphere.size()},
                   {"min_pole_distance", seg_pole_distance}};
    r["im_cuts"] = rays;
  }
  write_text_file(out / "project.json", dump(r));
  return r;
}

json cmd_ingest_classify(const json& config, const std::filesystem::path& out) {
  const std::string input = config.at("input").get<std::string>();
  if (input.empty()) config_fail("ingest-classify needs an input path");
  const auto modes = get_pair(config, "modes");
  const TrajectoryDataset data = ingest_csv(input);
  const ScanTrajectory traj =
      dataset_trajectory(data, static_cast<int>(modes.first), static_cast<int>(modes.second));
  const ClassReport report = classify(traj, read_classify(config));
  json r{{"config", config},
         {"dataset",
          {{"scan_name", data.scan_name},
           {"rows", data.scan_values.size()},
           {"modes", data.modes.size()},
           {"metadata", data.metadata}}},
         {"report", to_json(report)},
         {"ambiguous_points", traj.ambiguous_points.size()}};
  write_text_file(out / "report.json", dump(r));
  return r;
}

json cmd_oracle(const json& config, const std::filesystem::path& out) {
  const AnalyticOracle oracle = read_oracle(config.at("oracle"));
  const PairSampler sampler = oracle_sampler(oracle);
  const std::string task = config.at("task").get<std::string>();
  if (task == "surface") return cmd_surface_common(config, sampler, out, "oracle_surface", json::object());
  if (task == "loop") {
    EncircleOptions opt = read_encircle(config);
    if (const auto* two = std::get_if<TwoPointOracle>(&oracle)) {
      opt.known_eps = {{two->z1.real(), two->z1.imag(), 0.0, 2}, {two->z2.real(), two->z2.imag(), 0.0, 2}};
    } else {
      const auto& one = std::get<SinglePointOracle>(oracle);
      opt.known_eps = {{one.z0.real(), one.z0.imag(), 0.0, one.order}};
    }
    const LoopResult res = encircle(sampler, read_loop(config.at("loop")), opt);
    json r{{"config", config}, {"result", to_json(res)}};
    write_text_file(out / "oracle_loop.json", dump(r));
    return r;
  }
  config_fail("oracle task must be 'surface' or 'loop'");
}

void apply_grid(const std::string& command, json& config, std::pair<int, int> grid) {
  const auto [n1, n2] = grid;
  if (command == "toy-sweep" || command == "beta-scan") {
    if (n2 != 1) config_fail("--grid for a 1-D scan must be <points>x1");
    config["scan"]["points"] = n1;
  } else if (command == "find-eps") {
    if (n1 != n2) config_fail("--grid for find-eps must be square");
    config["grid_search"]["coarse_n"] = n1;
    config["grid_search"]["enabled"] = true;
  } else if (command == "surface" || command == "oracle") {
    config["surface"]["n1"] = n1;
    config["surface"]["n2"] = n2;
  } else {
    config_fail("--grid is not used by " + command);
  }
}

void apply_tolerance(const std::string& command, json& config, double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) config_fail("--tolerance must be positive");
  if (command == "toy-sweep" || command == "ingest-classify") {
    config["classify"]["gap_floor"] = tol;
  } else if (command == "beta-scan") {
    config["resolution"] = tol;
  } else if (command == "find-eps") {
    config["roots"]["eta_sq_tolerance"] = tol;
  } else if (command == "encircle" || command == "oracle") {
    config["encircle"]["closure_tolerance"] = tol;
  } else {
    config_fail("--tolerance is not used by " + command);
  }
}

}  // namespace

std::vector<std::string> command_names() {
  return {"toy-sweep", "find-eps", "surface", "encircle", "beta-scan", "project", "ingest-classify", "oracle"};
}

std::vector<std::string> command_presets(const std::string& command) {
  if (command == "toy-sweep" || command == "find-eps" || command == "surface") {
    std::vector<std::string> names{"double-ep"};
    for (const auto& n : toy_preset_names())
      if (n != "double-ep") names.push_back(n);
    return names;
  }
  if (command == "encircle") return {"loop-both", "loop-ep1", "loop-ep2"};
  if (command == "beta-scan") return {"class-transition"};
  if (command == "project") return {"microcavity"};
  if (command == "oracle") return {"oracle-surface", "oracle-loop-ep1", "oracle-loop-ep2", "oracle-loop-both"};
  return {};
}

std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) config_fail("--grid must look like <n1>x<n2>");
  try {
    std::size_t used1 = 0, used2 = 0;
    const int n1 = std::stoi(text.substr(0, x), &used1);
    const int n2 = std::stoi(text.substr(x + 1), &used2);
    if (used1 != x || used2 != text.size() - x - 1 || n1 < 1 || n2 < 1) throw std::invalid_argument("grid");
    return {n1, n2};
  } catch (const std::logic_error&) {
    config_fail("--grid must look like <n1>x<n2> with positive integers");
  }
}

json resolve_config(const CliRequest& request) {
  json config = command_defaults(request.command);
  const auto presets = command_presets(request.command);

  std::optional<std::string> preset = request.preset;
  if (!preset && !presets.empty()) preset = presets.front();
  if (preset) {
    const auto patch = preset_patch(request.command, *preset);
    if (!patch) config_fail("unknown preset '" + *preset + "' for " + request.command);
    config.merge_patch(*patch);
    config["preset"] = *preset;
  }

  if (request.config_path) {
    std::ifstream in(*request.config_path);
    if (!in) throw Error(errc::kIo, "cannot open config " + request.config_path->string());
    json file;
    try {
      file = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(errc::kParse, request.config_path->string() + ": " + e.what());
    }
    if (!file.is_object()) config_fail("config file must hold a JSON object");
    for (const auto& [k, v] : file.items()) {
      if (k == "command" && v != request.command) config_fail("config is for command " + v.dump());
      if (!config.contains(k)) config_fail("unknown config key '" + k + "' for " + request.command);
    }
    config.merge_patch(file);
  }

  if (request.threads) config["threads"] = *request.threads;
  if (request.grid) apply_grid(request.command, config, *request.grid);
  if (request.tolerance) apply_tolerance(request.command, config, *request.tolerance);
  if (!config.at("threads").is_number_integer() || config.at("threads").get<int>() < 1)
    config_fail("threads must be a positive integer");
  return config;
}

json execute(const std::string& command, const json& config, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(errc::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  try {
    if (command == "toy-sweep") return cmd_toy_sweep(config, out_dir);
    if (command == "find-eps") return cmd_find_eps(config, out_dir);
    if (command == "surface") return cmd_surface(config, out_dir);
    if (command == "encircle") return cmd_encircle(config, out_dir);
    if (command == "beta-scan") return cmd_beta_scan(config, out_dir);
    if (command == "project") return cmd_project(config, out_dir);
    if (command == "ingest-classify") return cmd_ingest_classify(config, out_dir);
    if (command == "oracle") return cmd_oracle(config, out_dir);
  } catch (const json::exception& e) {
    throw Error(errc::kConfig, e.what());
  }
  config_fail("unknown command '" + command + "'");
}

int run(const CliRequest& request, std::ostream& out, std::ostream& err) {
  try {
    const json config = resolve_config(request);
    out << dump(execute(request.command, config, request.out_dir));
    return 0;
  } catch (const Error& e) {
    err << dump({{"error", {{"code", e.code()}, {"message", e.what()}}}});
    return e.code() == errc::kConfig || e.code() == errc::kParse ? 2 : 1;
  } catch (const std::exception& e) {
    err << dump({{"error", {{"code", "internal_error"}, {"message", e.what()}}}});
    return 1;
  }
}

}  // namespace nhep
