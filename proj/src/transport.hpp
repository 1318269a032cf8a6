#pragma once

#include <Eigen/Dense>
#include <vector>

#include "manifold.hpp"

namespace ddej {

// A differentiable piece of a path: grid of times with chart coordinates and
// coordinate velocities per node. Between nodes the curve is read by cubic
// Hermite interpolation of (points, velocities).
struct PathSegment {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> velocities;

  // Rough (stochastic) segments carry smoothed chord velocities that are fine
  // for plotting but bias transport: integrating along the Hermite curve picks
  // up a spurious quadratic-variation correction through the derivative of the
  // connection. Transport therefore traverses rough segments chordwise
  // (piecewise linear), whose limit is the Stratonovich transport.
  bool rough = false;

  int num_nodes() const { return static_cast<int>(times.size()); }
  double start_time() const { return times.front(); }
  double end_time() const { return times.back(); }
  const Eigen::VectorXd& start_point() const { return points.front(); }
  const Eigen::VectorXd& end_point() const { return points.back(); }

  Eigen::VectorXd value(double t) const;
  Eigen::VectorXd velocity(double t) const;

  // Sub-segment over [s, t] (endpoints inserted by Hermite interpolation).
  PathSegment slice(double s, double t) const;
  // Time-reversed segment (velocities negated).
  PathSegment reversed() const;

  void validate() const;
};

// Constant segment sitting at one point (zero velocities).
PathSegment constant_segment(const Eigen::VectorXd& point, double t0, double t1, int nodes = 2);

// Fictitious curve filling the gap at jump n: beta_n : [0,1] -> M with
// beta_n(0) = pre-jump left limit, beta_n(1) = post-jump value.
struct JumpFill {
  int jump_index = 0;  // 1-based
  PathSegment curve;   // times span exactly [0, 1]
};

// A cadlag path: differentiable segments between jumps plus the family of
// jump-filling fictitious curves. Segment k ends at jump time t_{k+1} with the
// left-limit value; segment k+1 starts at t_{k+1} with the post-jump value.
struct PiecewisePath {
  std::vector<PathSegment> segments;
  std::vector<JumpFill> fills;
  std::vector<double> jump_times;

  double start_time() const { return segments.front().start_time(); }
  double end_time() const { return segments.back().end_time(); }

  // Cadlag evaluation: at a jump time returns the post-jump value.
  Eigen::VectorXd value(double t) const;
  // Left limit at t (differs from value(t) only at jump times).
  Eigen::VectorXd left_limit(double t) const;

  void validate() const;
};

// Coordinate representation of the linear map T_from -> T_to obtained by
// parallel transport.
struct TransportMatrix {
  ChartPoint from_point;
  ChartPoint to_point;
  Eigen::MatrixXd matrix;
};

// One RK4 interval of the frame ODE dE/dt = -Gamma(gamma) gamma' E along the
// Hermite curve piece defined by the endpoint data; returns the advanced E.
Eigen::MatrixXd transport_interval(const ManifoldSpec& m, double t0, double t1,
                                   const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                                   const Eigen::VectorXd& x1, const Eigen::VectorXd& v1,
                                   const Eigen::MatrixXd& e);

// Transport along one differentiable segment: RK4 on the linear frame ODE
// dE/dt = -Gamma(gamma(t)) gamma'(t) E, E(start) = I, one step per grid
// interval with Hermite interpolation of the curve at interior stages.
TransportMatrix transport_segment(const ManifoldSpec& m, const PathSegment& seg,
                                  double singular_det = 1e-12);

// Windowed transport P^{nabla,B}_{s,t} along a cadlag path: composition of
// segment transports interleaved with the fictitious-curve transports for
// every jump in (s, t], in time order.
TransportMatrix concat_transport(const ManifoldSpec& m, const PiecewisePath& path,
                                 double s, double t, double singular_det = 1e-12);

Tangent transport_vector(const TransportMatrix& p, const Tangent& v);

}  // namespace ddej
