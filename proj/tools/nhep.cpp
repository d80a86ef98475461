#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhep/cli.hpp"
#include "nhep/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Exceptional-point analysis of two-level non-Hermitian models"};
  app.require_subcommand(1);

  std::optional<std::string> preset;
  std::optional<std::string> config;
  std::string out_dir = ".";
  std::optional<int> threads;
  std::optional<std::string> grid;
  std::optional<double> tolerance;

  const std::map<std::string, std::string> help{
      {"toy-sweep", "Scan alpha, write the matched trajectory and its crossing report"},
      {"find-eps", "Locate exceptional points of the toy model"},
      {"surface", "Sample both eigenvalue sheets over a parameter window and extract cuts"},
      {"encircle", "Continue the eigenvalue pair around a closed loop"},
      {"beta-scan", "Bisect the coupling phase at which the crossing type changes"},
      {"project", "Map exceptional points and canonical cuts onto the Riemann sphere"},
      {"ingest-classify", "Classify an externally computed trajectory CSV"},
      {"oracle", "Surface or loop on the analytic square-root reference"}};

  for (const auto& name : nhep::command_names()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--preset", preset, "Named parameter set");
    sub->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--grid", grid, "Grid size <n1>x<n2>");
    sub->add_option("--tolerance", tolerance, "Command tolerance");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  nhep::CliRequest request;
  request.command = app.get_subcommands().front()->get_name();
  request.preset = preset;
  if (config) request.config_path = *config;
  request.out_dir = out_dir;
  request.threads = threads;
  request.tolerance = tolerance;
  if (grid) {
    try {
      request.grid = nhep::parse_grid(*grid);
    } catch (const nhep::Error& e) {
      const nlohmann::json j{{"error", {{"code", e.code()}, {"message", e.what()}}}};
      std::cerr << j.dump(2) << '\n';
      return 2;
    }
  }
  return nhep::run(request, std::cout, std::cerr);
}
