#pragma once

// Dataset ingestion and result serialization.
//
// Trajectory CSV:  optional "# key=value" metadata lines, then the header
//   scan,re_1,im_1,re_2,im_2[,re_3,im_3,...]
// followed by one row per scan value. Comma-separated, '.' decimal point,
// LF line endings on output.

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhep/crossing.hpp"
#include "nhep/ep_finder.hpp"
#include "nhep/sphere.hpp"
#include "nhep/surface.hpp"
#include "nhep/toy_model.hpp"

namespace nhep {

struct TrajectoryDataset {
  std::string scan_name = "scan";
  std::vector<double> scan_values;
  std::vector<std::vector<std::complex<double>>> modes;  // one series per mode, ≥ 2
  std::map<std::string, std::string> metadata;

  // Throws Error(parse_error) on ragged series or non-monotone scan.
  void validate() const;
};

TrajectoryDataset parse_trajectory_csv(std::istream& in);
TrajectoryDataset ingest_csv(const std::filesystem::path& path);

/// Continuity-matched trajectory of two modes (0-based). A decreasing scan
/// is reversed first so the trajectory runs in increasing order.
ScanTrajectory dataset_trajectory(const TrajectoryDataset& data, int mode_a = 0, int mode_b = 1);

void write_trajectory_csv(std::ostream& out, const ScanTrajectory& traj,
                          const std::map<std::string, std::string>& metadata = {});

/// Long format: p1,p2,re1,im1,re2,im2,is_cut_edge (one row per node,
/// is_cut_edge = 1 when the node ends an edge of cut_cells). Missing nodes
/// are skipped.
void write_surface_csv(std::ostream& out, const SheetGrid& grid);

void write_sphere_csv(std::ostream& out, std::span<const SpherePoint<double>> points);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

nlohmann::json to_json(const ToyParams& p);
ToyParams toy_params_from_json(const nlohmann::json& j, const ToyParams& defaults = {});
nlohmann::json to_json(const EpLocation& e);
nlohmann::json to_json(const ClassReport& r);
nlohmann::json to_json(const LoopResult& r);
nlohmann::json to_json(const GridEdge& e);
nlohmann::json to_json(const CutComponent& c);
nlohmann::json surface_summary(const SheetGrid& grid);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace nhep
