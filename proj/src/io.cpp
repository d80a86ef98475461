#include "nhep/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nhep {
namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(errc::kParse, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(s);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

}  // namespace

void TrajectoryDataset::validate() const {
  if (modes.size() < 2) throw Error(errc::kParse, "dataset needs at least two eigenvalue series");
  for (const auto& m : modes)
    if (m.size() != scan_values.size()) throw Error(errc::kParse, "eigenvalue series length differs from scan");
  if (scan_values.size() < 2) return;
  const bool increasing = scan_values[1] > scan_values[0];
  for (std::size_t k = 1; k < scan_values.size(); ++k) {
    const bool ok = increasing ? scan_values[k] > scan_values[k - 1] : scan_values[k] < scan_values[k - 1];
    if (!ok) throw Error(errc::kParse, "scan values are not strictly monotone at row " + std::to_string(k + 1));
  }
}

TrajectoryDataset parse_trajectory_csv(std::istream& in) {
  TrajectoryDataset data;
  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  int direction = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    if (columns == 0) {
      if (line.front() == '#') {
        const std::string body = trim(line.substr(1));
        const auto eq = body.find('=');
        if (eq == std::string::npos) parse_fail(lineno, "metadata line must be '# key=value'");
        const std::string key = trim(body.substr(0, eq));
        data.metadata[key] = trim(body.substr(eq + 1));
        if (key == "scan_name") data.scan_name = data.metadata[key];
        continue;
      }
      const auto header = split_commas(line);
      if (header.size() < 5 || (header.size() - 1) % 2 != 0)
        parse_fail(lineno, "header must be scan,re_1,im_1,re_2,im_2[,...]");
      if (trim(header[0]) != "scan") parse_fail(lineno, "first header column must be 'scan'");
      for (std::size_t m = 0; m < (header.size() - 1) / 2; ++m) {
        const std::string k = std::to_string(m + 1);
        if (trim(header[1 + 2 * m]) != "re_" + k || trim(header[2 + 2 * m]) != "im_" + k)
          parse_fail(lineno, "expected columns re_" + k + ",im_" + k);
      }
      columns = header.size();
      data.modes.resize((columns - 1) / 2);
      continue;
    }

    const auto cells = split_commas(line);
    if (cells.size() != columns)
      parse_fail(lineno, "expected " + std::to_string(columns) + " fields, found " + std::to_string(cells.size()));
    std::vector<double> v(columns);
    for (std::size_t c = 0; c < columns; ++c)
      if (!parse_number(cells[c], v[c])) parse_fail(lineno, "non-numeric cell '" + trim(cells[c]) + "'");

    if (!data.scan_values.empty()) {
      const double prev = data.scan_values.back();
      if (v[0] == prev) parse_fail(lineno, "duplicated scan value " + format_double(v[0]));
      const int dir = v[0] > prev ? 1 : -1;
      if (direction != 0 && dir != direction) parse_fail(lineno, "scan values are not monotone");
      direction = dir;
    }
    data.scan_values.push_back(v[0]);
    for (std::size_t m = 0; m < data.modes.size(); ++m) data.modes[m].emplace_back(v[1 + 2 * m], v[2 + 2 * m]);
  }
  if (columns == 0) throw Error(errc::kParse, "missing header row");
  if (data.scan_values.empty()) throw Error(errc::kParse, "no data rows");
  data.validate();
  return data;
}

TrajectoryDataset ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::kIo, "cannot open " + path.string());
  try {
    return parse_trajectory_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

ScanTrajectory dataset_trajectory(const TrajectoryDataset& data, int mode_a, int mode_b) {
  data.validate();
  const auto n_modes = static_cast<int>(data.modes.size());
  if (mode_a < 0 || mode_b < 0 || mode_a >= n_modes || mode_b >= n_modes || mode_a == mode_b)
    throw Error(errc::kConfig, "mode indices out of range or equal");
  std::vector<double> ts = data.scan_values;
  std::vector<EigenPair> raw(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k)
    raw[k] = {data.modes[static_cast<std::size_t>(mode_a)][k], data.modes[static_cast<std::size_t>(mode_b)][k]};
  if (ts.size() >= 2 && ts[1] < ts[0]) {
    std::reverse(ts.begin(), ts.end());
    std::reverse(raw.begin(), raw.end());
  }
  return match_branches(ts, raw);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_trajectory_csv(std::ostream& out, const ScanTrajectory& traj,
                          const std::map<std::string, std::string>& metadata) {
  for (const auto& [k, v] : metadata) out << "# " << k << '=' << v << '\n';
  out << "scan,re_1,im_1,re_2,im_2\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.ts[k]) << ',' << format_double(traj.branch_a[k].real()) << ','
        << format_double(traj.branch_a[k].imag()) << ',' << format_double(traj.branch_b[k].real()) << ','
        << format_double(traj.branch_b[k].imag()) << '\n';
  }
}

void write_surface_csv(std::ostream& out, const SheetGrid& grid) {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> on_cut =
      Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(grid.n1(), grid.n2(), false);
  for (const GridEdge& e : grid.cut_cells) {
    on_cut(e.i, e.j) = true;
    on_cut(e.vertical ? e.i : e.i + 1, e.vertical ? e.j + 1 : e.j) = true;
  }
  out << "p1,p2,re1,im1,re2,im2,is_cut_edge\n";
  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      if (grid.missing(i, j)) continue;
      const auto a = grid.sheet1(i, j), b = grid.sheet2(i, j);
      out << format_double(grid.axis1[static_cast<std::size_t>(i)]) << ','
          << format_double(grid.axis2[static_cast<std::size_t>(j)]) << ',' << format_double(a.real()) << ','
          << format_double(a.imag()) << ',' << format_double(b.real()) << ',' << format_double(b.imag()) << ','
          << (on_cut(i, j) ? 1 : 0) << '\n';
    }
  }
}

void write_sphere_csv(std::ostream& out, std::span<const SpherePoint<double>> points) {
  out << "tn,tchi,txi\n";
  for (const auto& p : points)
    out << format_double(p.tn) << ',' << format_double(p.tchi) << ',' << format_double(p.txi) << '\n';
}

nlohmann::json to_json(const ToyParams& p) {
  return {{"g_c", p.g_c},
          {"beta", p.beta},
          {"gamma1", p.gamma1},
          {"gamma2", p.gamma2},
          {"sensitivity", to_string(p.mode)}};
}

ToyParams toy_params_from_json(const nlohmann::json& j, const ToyParams& defaults) {
  ToyParams p = defaults;
  if (!j.is_object()) throw Error(errc::kConfig, "params must be an object");
  try {
    if (j.contains("g_c")) p.g_c = j.at("g_c").get<double>();
    if (j.contains("beta")) p.beta = j.at("beta").get<double>();
    if (j.contains("gamma1")) p.gamma1 = j.at("gamma1").get<double>();
    if (j.contains("gamma2")) p.gamma2 = j.at("gamma2").get<double>();
    if (j.contains("sensitivity")) p.mode = sensitivity_mode_from_string(j.at("sensitivity").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kConfig, std::string("params: ") + e.what());
  }
  return p;
}

nlohmann::json to_json(const EpLocation& e) {
  return {{"p1", e.p1}, {"p2", e.p2}, {"residual", e.residual}, {"order", e.order}};
}

nlohmann::json to_json(const ClassReport& r) {
  nlohmann::json j{{"label", to_string(r.label)},
                   {"re_min_gap", r.re_min_gap},
                   {"im_min_gap", r.im_min_gap},
                   {"re_cross_points", r.re_cross_points},
                   {"im_cross_points", r.im_cross_points}};
  j["bifurcation_edges"] =
      r.bifurcation_edges ? nlohmann::json::array({r.bifurcation_edges->first, r.bifurcation_edges->second})
                          : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const LoopResult& r) {
  nlohmann::json eps = nlohmann::json::array();
  for (const auto& e : r.enclosed_eps) eps.push_back(to_json(e));
  return {{"permutation", to_string(r.permutation)},
          {"n_steps", r.n_steps},
          {"max_step_jump", r.max_step_jump},
          {"min_gap", r.min_gap},
          {"enclosed_eps", eps}};
}

nlohmann::json to_json(const GridEdge& e) { return {{"i", e.i}, {"j", e.j}, {"vertical", e.vertical}}; }

nlohmann::json to_json(const CutComponent& c) {
  return {{"edges", c.edges.size()},
          {"endpoints", {{c.endpoints[0][0], c.endpoints[0][1]}, {c.endpoints[1][0], c.endpoints[1][1]}}},
          {"touches_boundary", c.touches_boundary}};
}

nlohmann::json surface_summary(const SheetGrid& grid) {
  auto edges = [](const std::vector<GridEdge>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : v) a.push_back(to_json(e));
    return a;
  };
  auto components = [&](const std::vector<GridEdge>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : cut_components(grid, v)) a.push_back(to_json(c));
    return a;
  };
  return {{"grid", {grid.n1(), grid.n2()}},
          {"axis1", {grid.axis1.front(), grid.axis1.back()}},
          {"axis2", {grid.axis2.front(), grid.axis2.back()}},
          {"delta_mode", grid.delta_mode == DeltaMode::Raw ? "raw" : "relative"},
          {"missing", grid.missing_count()},
          {"cut_cells", edges(grid.cut_cells)},
          {"re_cut_edges", edges(grid.re_cut_edges)},
          {"im_cut_edges", edges(grid.im_cut_edges)},
          {"cut_components", components(grid.cut_cells)},
          {"re_cut_components", components(grid.re_cut_edges)},
          {"im_cut_components", components(grid.im_cut_edges)}};
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::kIo, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(errc::kIo, "write failed for " + path.string());
}

}  // namespace nhep
