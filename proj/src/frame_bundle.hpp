#pragma once

#include <Eigen/Dense>
#include <vector>

#include "manifold.hpp"
#include "solver.hpp"
#include "transport.hpp"

namespace ddej {

// A point of the linear frame bundle BM: base point plus an invertible matrix
// whose column i holds the coordinate components of the i-th frame vector.
struct FramePoint {
  ChartPoint base;
  Eigen::MatrixXd frame;
};

// Tangent vector on BM split into the pushforward under the projection and
// the derivative of the frame entries. Horizontal iff
// frame_component = -Gamma(base) . base_component . frame; vertical iff
// base_component = 0.
struct BundleTangent {
  Eigen::VectorXd base_component;
  Eigen::MatrixXd frame_component;
};

struct VerticalGenerator {
  Eigen::MatrixXd algebra_element;
};

// The unique horizontal tangent at p projecting to v.
BundleTangent horizontal_lift_vector(const ManifoldSpec& m, const FramePoint& p,
                                     const Tangent& v);

// Generator of the right GL(n) action: A*(p) = d/dt p.exp(At)|_0.
BundleTangent vertical_field(const FramePoint& p, const VerticalGenerator& a);

// Deviation of w from the horizontal subspace at p (max-norm of the
// horizontality residual).
double horizontality_residual(const ManifoldSpec& m, const FramePoint& p,
                              const BundleTangent& w);

// Horizontal lift of a cadlag path: frame at t is the windowed transport from
// the path start applied to p0.frame, computed incrementally, cadlag across
// fills.
struct LiftedPath {
  std::vector<double> times;      // cadlag sample times (jump nodes carry post-jump frames)
  std::vector<FramePoint> nodes;
  std::vector<int> jump_nodes;    // indices into times/nodes
  std::vector<FramePoint> left_nodes;  // pre-jump frames per jump

  int node_index(double t) const;
};

LiftedPath lift_path(const ManifoldSpec& m, const PiecewisePath& path, const FramePoint& p0,
                     double singular_det = 1e-12);

// nabla^H-parallel transport of a horizontal vector along a lifted path:
// transports the base projection with the windowed base transport and lifts
// back horizontally at the target frame. s > t transports backwards.
BundleTangent transport_horizontal(const ManifoldSpec& m, const LiftedPath& lifted,
                                   const PiecewisePath& base_path, double s, double t,
                                   const BundleTangent& w, double horizontal_tol = 1e-6);

// Lifted DDEJ/SDDEJ on BM: the initial bundle curve is the horizontal lift of
// the initial curve at p0 and the state frame doubles as the running
// transport. Output frames are the bundle component of the solution.
SolutionPath solve_lifted_ddej(const EquationSpec& eq, const FramePoint& p0,
                               const DriverPath& driver, const SolverConfig& cfg);

// Finite-difference check of nabla^H_{X^H} Y^H = (nabla_X Y)^H at p: returns
// the residual norm, expected O(eps).
double check_nablaH_horizontal(const ManifoldSpec& m, const VectorFieldSpec& x_field,
                               const VectorFieldSpec& y_field, const FramePoint& p,
                               double fd_step);

}  // namespace ddej
