#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace ddej {

// Jump times t_1 < t_2 < ... with mark vectors J_n in R^{m+1}
// (component 0 drives the drift field, components 1..m the diffusion fields).
struct JumpSchedule {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> marks;

  void validate() const;
};

// N_t = max{n : t_n <= t}, max of the empty set = 0. Right-continuous.
int count_jumps(const JumpSchedule& schedule, double t);

// Mark distributions for sampled schedules.
struct ConstantMark {
  Eigen::VectorXd value;
};
struct GaussianMark {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};
struct UniformBoxMark {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};
using MarkLaw = std::variant<ConstantMark, GaussianMark, UniformBoxMark>;

// Realized integrator L_t = (L^0, ..., L^m): uniform grid with Brownian
// increments per step plus a jump schedule snapped onto grid nodes.
// Component 0 is deterministic time (B^0_t = t). Degenerates to the
// deterministic integrator S_t when m = 0.
struct DriverPath {
  double h = 0.0;
  double horizon = 0.0;
  int m = 0;                                 // number of Brownian components
  std::vector<Eigen::VectorXd> increments;   // per step, length m
  JumpSchedule schedule;                     // snapped to grid nodes

  int steps() const { return static_cast<int>(increments.size()); }
  double node_time(int j) const { return h * j; }

  // L_t with cadlag jumps; Brownian part linearly interpolated between nodes.
  // Returns a vector of length m + 1.
  Eigen::VectorXd value(double t) const;
  // Continuous part B_t alone (length m + 1, component 0 = t).
  Eigen::VectorXd continuous_part(double t) const;
};

// Snap schedule times to grid nodes in (0, T], keeping them distinct with a
// minimum separation of one grid step; pushes collisions to the next free node.
JumpSchedule snap_schedule(const JumpSchedule& schedule, double h, double T);

// Deterministic integrator S_t = t + sum_{k <= N_t} J_k (scalar marks, m = 0).
DriverPath deterministic_integrator(const JumpSchedule& schedule, double T, double h);

// Brownian driver with no jumps: independent N(0, h) increments per component
// per step. Identical seed gives bitwise-identical increments.
DriverPath sample_brownian(std::uint64_t seed, double h, double T, int m);

// Poisson jump times of rate lambda on (0, T] with i.i.d. marks.
JumpSchedule sample_poisson_schedule(std::uint64_t seed, double rate, double T,
                                     const MarkLaw& mark_law, int m);

// Brownian-bridge refinement: halves h, conditionally samples midpoints.
// Jump times stay on (now finer) grid nodes.
DriverPath refine_half(const DriverPath& driver, std::uint64_t seed);

// Per-trajectory seed stream: splitmix64 mix of base seed and index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace ddej
