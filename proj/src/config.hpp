#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drivers.hpp"
#include "fields.hpp"
#include "manifold.hpp"
#include "solver.hpp"

namespace ddej {

enum class JumpKind { none, schedule, poisson };

// Parsed experiment configuration (JSON schema documented in the README).
struct RunConfig {
  std::string mode;  // simulate | lift-check | transport | convergence | ensemble
  std::uint64_t seed = 0;
  int threads = 1;

  ManifoldSpec manifold;
  std::vector<VectorFieldSpec> fields;  // m + 1 fields (drift first)
  int m = 0;                            // Brownian components

  double delay = 0.0;
  double step = 0.0;
  double horizon = 0.0;
  std::optional<Scheme> scheme;
  int fictitious_steps = 64;
  bool metric_projection = false;

  JumpKind jump_kind = JumpKind::none;
  JumpSchedule schedule;  // raw, snapped per grid at run time
  double poisson_rate = 0.0;
  std::optional<MarkLaw> mark_law;

  PathSegment initial_curve;  // over [-d, 0]

  int ensemble = 1;
  bool output_frames = false;
  bool dump_driver = false;
  bool write_trajectories = true;
  std::string prefix = "traj";

  std::optional<PathSegment> curve;  // transport mode
  std::vector<double> step_list;     // lift-check / convergence
  Eigen::MatrixXd initial_frame;     // lift-check, default identity
  int paths = 20;                    // stochastic lift-check sample paths
};

// Parses and validates a config document. Throws ConfigError on schema
// violations.
RunConfig parse_config(const std::string& json_text);

}  // namespace ddej
