#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "nhep/io.hpp"

namespace {

nhep::TrajectoryDataset parse(const std::string& text) {
  std::istringstream in(text);
  return nhep::parse_trajectory_csv(in);
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const nhep::Error& e) {
    CHECK(e.code() == nhep::errc::kParse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

}  // namespace

TEST_CASE("three-row file") {
  const auto d = parse(
      "# n_in=2.6257\n# scan_name=chi\n"
      "scan,re_1,im_1,re_2,im_2\n"
      "0.1,1,-0.01,2,-0.02\n"
      "0.2,1.1,-0.011,1.9,-0.019\n"
      "0.3,1.2,-0.012,1.8,-0.018\n");
  CHECK(d.scan_values.size() == 3);
  CHECK(d.modes.size() == 2);
  CHECK(d.modes[1][2] == std::complex<double>(1.8, -0.018));
  CHECK(d.metadata.at("n_in") == "2.6257");
  CHECK(d.scan_name == "chi");
}

TEST_CASE("more than two modes and CRLF endings") {
  const auto d = parse("scan,re_1,im_1,re_2,im_2,re_3,im_3\r\n1,0,0,1,0,2,0\r\n2,0,0,1,0,2,0\r\n");
  CHECK(d.modes.size() == 3);
  CHECK(d.scan_values.size() == 2);
}

TEST_CASE("parse errors name the line") {
  CHECK(parse_error("scan,re_1,im_1,re_2,im_2\n0.1,1,0,2,0\n0.1,1,0,2,0\n").find("line 3") != std::string::npos);
  CHECK(parse_error("scan,re_1,im_1,re_2,im_2\n0.1,1,0,2,0\n0.2,1,0,2\n").find("line 3") != std::string::npos);
  CHECK(parse_error("scan,re_1,im_1,re_2,im_2\n0.1,1,0,2,0\n0.2,abc,0,2,0\n").find("line 3") != std::string::npos);
  CHECK(parse_error("scan,re_1,im_1,re_2,im_2\n0.1,1,0,2,0\n0.3,1,0,2,0\n0.2,1,0,2,0\n").find("line 4") !=
        std::string::npos);
  CHECK(parse_error("t,re_1,im_1,re_2,im_2\n0.1,1,0,2,0\n").find("line 1") != std::string::npos);
  CHECK(parse_error("scan,re_1,im_1\n0.1,1,0\n").find("line 1") != std::string::npos);
  CHECK(parse_error("# broken\nscan,re_1,im_1,re_2,im_2\n").find("line 1") != std::string::npos);
  parse_error("");
  parse_error("scan,re_1,im_1,re_2,im_2\n");
  parse_error("scan,re_1,im_1,re_2,im_2\n0.1,1,0,2,nan\n");
}

TEST_CASE("decreasing scans are accepted and reversed for matching") {
  const auto d = parse("scan,re_1,im_1,re_2,im_2\n0.3,1,0,2,0\n0.2,1,0,2,0\n0.1,1,0,2,0\n");
  const auto t = nhep::dataset_trajectory(d);
  CHECK(t.ts.front() == 0.1);
  CHECK(t.ts.back() == 0.3);
  CHECK_THROWS_AS(nhep::dataset_trajectory(d, 0, 0), nhep::Error);
  CHECK_THROWS_AS(nhep::dataset_trajectory(d, 0, 2), nhep::Error);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::stod(nhep::format_double(v)) == v);
  CHECK(nhep::format_double(0.5) == "0.5");
}

TEST_CASE("toy scan export and re-ingestion classify identically") {
  for (const std::string name : {"class1", "class2", "class3a", "class4", "class5", "double-ep"}) {
    CAPTURE(name);
    const auto scan = nhep::toy_scan(nhep::toy_preset(name)->params, nhep::AlphaScan{});
    const auto traj = scan.trajectory();
    std::stringstream csv;
    nhep::write_trajectory_csv(csv, traj, {{"scan_name", "alpha"}});
    const auto data = nhep::parse_trajectory_csv(csv);
    const auto back = nhep::dataset_trajectory(data);
    REQUIRE(back.size() == traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
      CHECK(back.ts[k] == traj.ts[k]);
      CHECK(back.branch_a[k] == traj.branch_a[k]);
      CHECK(back.branch_b[k] == traj.branch_b[k]);
    }
    const auto a = nhep::classify(traj), b = nhep::classify(back);
    CHECK(a.label == b.label);
    CHECK(a.re_min_gap == b.re_min_gap);
    CHECK(a.im_min_gap == b.im_min_gap);
    CHECK(a.re_cross_points == b.re_cross_points);
    CHECK(a.im_cross_points == b.im_cross_points);
    CHECK(a.bifurcation_edges == b.bifurcation_edges);
  }
}

TEST_CASE("ingest from disk") {
  const auto dir = std::filesystem::temp_directory_path() / "nhep_test_io";
  std::filesystem::create_directories(dir);
  nhep::write_text_file(dir / "d.csv", "scan,re_1,im_1,re_2,im_2\n0,1,0,2,0\n1,1,0,2,0\n2,1,0,2,0\n");
  CHECK(nhep::ingest_csv(dir / "d.csv").scan_values.size() == 3);
  try {
    nhep::ingest_csv(dir / "absent.csv");
    FAIL("expected io error");
  } catch (const nhep::Error& e) {
    CHECK(e.code() == nhep::errc::kIo);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("surface CSV layout") {
  nhep::SurfaceOptions o;
  o.n1 = 16;
  o.n2 = 16;
  const auto g =
      nhep::build_surface(nhep::toy_plane_sampler(nhep::ToyParams{}), nhep::Window{0.3, 0.8, 0.9, 1.1}, o);
  std::stringstream out;
  nhep::write_surface_csv(out, g);
  std::string header;
  std::getline(out, header);
  CHECK(header == "p1,p2,re1,im1,re2,im2,is_cut_edge");
  int rows = 0, flagged = 0;
  for (std::string line; std::getline(out, line); ++rows) flagged += line.back() == '1';
  CHECK(rows == 256);
  CHECK(flagged > 0);
  CHECK(out.str().find('\r') == std::string::npos);

  const auto j = nhep::surface_summary(g);
  CHECK(j.at("grid") == nlohmann::json({16, 16}));
  CHECK(j.at("re_cut_components").size() == 1);
}

TEST_CASE("sphere CSV") {
  std::vector<nhep::SpherePoint<double>> pts{{0, 0, -1}, {1, 0, 0}};
  std::stringstream out;
  nhep::write_sphere_csv(out, pts);
  CHECK(out.str() == "tn,tchi,txi\n0,0,-1\n1,0,0\n");
}

TEST_CASE("params JSON") {
  const nhep::ToyParams p{0.043, 0.78, 1.07, 1.05, nhep::SensitivityMode::RealPartDifference};
  const auto back = nhep::toy_params_from_json(nhep::to_json(p));
  CHECK(back.g_c == p.g_c);
  CHECK(back.beta == p.beta);
  CHECK(back.gamma1 == p.gamma1);
  CHECK(back.gamma2 == p.gamma2);
  CHECK(back.mode == p.mode);
  CHECK_THROWS_AS(nhep::toy_params_from_json(nlohmann::json{{"beta", "high"}}), nhep::Error);
  CHECK(nhep::toy_params_from_json(nlohmann::json{{"beta", 0.5}}).g_c == nhep::ToyParams{}.g_c);
}
