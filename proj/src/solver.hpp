#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "drivers.hpp"
#include "manifold.hpp"
#include "transport.hpp"

namespace ddej {

enum class Scheme { rk4_deterministic, heun_stratonovich };

// Delay equation data: drift field A^0 (the single field F in the
// deterministic case) plus diffusion fields A^1..A^m, a fixed delay d, and a
// differentiable initial curve on [-d, 0].
struct EquationSpec {
  ManifoldSpec manifold;
  std::vector<VectorFieldSpec> fields;
  double delay = 0.0;
  PathSegment initial_curve;
};

struct SolverConfig {
  double step = 1e-3;
  double horizon = 1.0;
  Scheme scheme = Scheme::rk4_deterministic;
  int fictitious_steps = 64;
  double singular_det = 1e-12;
  // Optional re-projection of the running frame onto metric isometries
  // (long-horizon runs); off by default so drift is measured, not hidden.
  bool metric_projection = false;
};

// Solution on [-d, T]: the cadlag path with its flow-generated fills, and the
// running transport frame U(t) from T_{beta0(-d)} along the concatenated path.
struct SolutionPath {
  PiecewisePath path;
  std::vector<double> grid;                   // nodes -d, -d+h, ..., T
  std::vector<Eigen::VectorXd> values;        // cadlag value per node
  std::vector<Eigen::MatrixXd> frames;        // U per node (post-jump at jump nodes)
  std::vector<Eigen::MatrixXd> frame_derivs;  // dU/dt per node
  std::vector<int> jump_nodes;                // node index per applied jump
  std::vector<Eigen::VectorXd> left_values;   // pre-jump left limit per jump
  std::vector<Eigen::MatrixXd> left_frames;   // pre-jump frame per jump
  DriverPath driver;
  double h = 0.0;
  int delay_steps = 0;
  std::vector<std::string> warnings;

  int num_nodes() const { return static_cast<int>(grid.size()); }
  // Grid-node index for time t; throws RangeError when t is not a node.
  int node_index(double t) const;
  const Eigen::VectorXd& value_at(double t) const { return values[node_index(t)]; }
  const Eigen::MatrixXd& frame_at(double t) const { return frames[node_index(t)]; }
};

// Marcus fictitious flow: RK4 on y' = sum_k J^k A_k(y) over fictitious time
// [0,1]; the fill starts at z and ends at the post-jump state.
JumpFill marcus_jump(const ManifoldSpec& m, const std::vector<VectorFieldSpec>& fields,
                     const Eigen::VectorXd& mark, const ChartPoint& z, int steps);

// The transported delayed coefficient V_i(t) = U(t) U(t-d)^{-1} A_i(x(t-d)),
// read at grid nodes with cadlag history.
Tangent delayed_vector(const ManifoldSpec& m, const std::vector<VectorFieldSpec>& fields,
                       const SolutionPath& sol, double t, int i);

// Deterministic DDEJ (driver m = 0): RK4 between jumps on the coupled
// (state, frame) system, Marcus fills at jumps.
SolutionPath solve_ddej(const EquationSpec& eq, const DriverPath& driver,
                        const SolverConfig& cfg);

// Stochastic SDDEJ: Heun (stochastic trapezoidal) Stratonovich steps between
// jumps, Marcus fills at jumps. Pathwise deterministic given the driver.
SolutionPath solve_sddej(const EquationSpec& eq, const DriverPath& driver,
                         const SolverConfig& cfg);

// Same engines with a caller-supplied initial frame at -d (identity above);
// used by the lifted solver on the frame bundle.
SolutionPath solve_with_frame(const EquationSpec& eq, const DriverPath& driver,
                              const SolverConfig& cfg, const Eigen::MatrixXd& initial_frame);

}  // namespace ddej
