#pragma once

#include <string>

#include <json.hpp>

#include "config.hpp"
#include "frame_bundle.hpp"
#include "solver.hpp"

namespace ddej {

// Builds the realized driver for one trajectory at grid step h.
DriverPath build_driver(const RunConfig& cfg, double h, std::uint64_t trajectory_seed);

// Solves one trajectory with the configured scheme.
SolutionPath solve_one(const RunConfig& cfg, double h, std::uint64_t trajectory_seed);

// Full-precision decimal serialization (round-trips doubles exactly).
std::string format_double(double v);

void write_solution_csv(const std::string& path, const SolutionPath& sol, bool frames);
void write_sidecar_json(const std::string& path, const SolutionPath& sol, bool dump_driver);

nlohmann::json driver_to_json(const DriverPath& d);
DriverPath driver_from_json(const nlohmann::json& j);

// Executes the configured experiment, writes artifacts under out_dir, and
// returns the run report (also written to out_dir/report.json).
nlohmann::json run_experiment(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json run_config_text(const std::string& config_json, const std::string& out_dir);

}  // namespace ddej
