#include "frame_bundle.hpp"

#include <algorithm>
#include <cmath>

namespace ddej {

namespace {

void check_base_match(const ChartPoint& a, const ChartPoint& b, const char* what) {
  if ((a.coords - b.coords).norm() > 1e-9)
    throw ContractError(std::string(what) + ": base points do not match");
}

// Central-difference Jacobian of a vector field's chart components.
Eigen::MatrixXd field_jacobian(const VectorFieldSpec& f, const ChartPoint& x,
                               double delta = 1e-6) {
  const int n = x.dim();
  Eigen::MatrixXd jac(n, n);
  for (int b = 0; b < n; ++b) {
    ChartPoint xp = x, xm = x;
    xp.coords[b] += delta;
    xm.coords[b] -= delta;
    jac.col(b) = (f.eval(xp).components - f.eval(xm).components) / (2.0 * delta);
  }
  return jac;
}

}  // namespace

BundleTangent horizontal_lift_vector(const ManifoldSpec& m, const FramePoint& p,
                                     const Tangent& v) {
  check_base_match(p.base, v.base, "horizontal_lift_vector");
  BundleTangent out;
  out.base_component = v.components;
  if (m.flat) {
    out.frame_component = Eigen::MatrixXd::Zero(m.dim, m.dim);
    return out;
  }
  const Eigen::MatrixXd a =
      christoffel_contract(m.connection.christoffel(p.base), v.components);
  out.frame_component = -a * p.frame;
  return out;
}

BundleTangent vertical_field(const FramePoint& p, const VerticalGenerator& a) {
  BundleTangent out;
  out.base_component = Eigen::VectorXd::Zero(p.base.dim());
  out.frame_component = p.frame * a.algebra_element;
  return out;
}

double horizontality_residual(const ManifoldSpec& m, const FramePoint& p,
                              const BundleTangent& w) {
  const Eigen::MatrixXd a =
      christoffel_contract(m.connection.christoffel(p.base), w.base_component);
  return (w.frame_component + a * p.frame).cwiseAbs().maxCoeff();
}

int LiftedPath::node_index(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t + 1e-9);
  int i = static_cast<int>(it - times.begin()) - 1;
  if (i < 0 || std::abs(times[i] - t) > 1e-9)
    throw RangeError("time is not a sample node of the lifted path");
  return i;  // cadlag: duplicates are not stored, jump nodes hold post-jump frames
}

LiftedPath lift_path(const ManifoldSpec& m, const PiecewisePath& path, const FramePoint& p0,
                     double singular_det) {
  check_base_match(p0.base, ChartPoint{path.segments.front().start_point()}, "lift_path");
  if (std::abs(p0.frame.determinant()) < singular_det)
    throw NumericalError("initial frame numerically singular");

  LiftedPath out;
  Eigen::MatrixXd f = p0.frame;
  out.times.push_back(path.start_time());
  out.nodes.push_back(FramePoint{ChartPoint{path.segments.front().start_point()}, f});

  for (size_t k = 0; k < path.segments.size(); ++k) {
    const PathSegment& seg = path.segments[k];
    const bool jump_after = k < path.jump_times.size();
    for (int i = 0; i + 1 < seg.num_nodes(); ++i) {
      if (seg.rough) {
        // Rough segments are traversed chordwise, matching transport_segment.
        const Eigen::VectorXd chord =
            (seg.points[i + 1] - seg.points[i]) / (seg.times[i + 1] - seg.times[i]);
        f = transport_interval(m, seg.times[i], seg.times[i + 1], seg.points[i], chord,
                               seg.points[i + 1], chord, f);
      } else {
        f = transport_interval(m, seg.times[i], seg.times[i + 1], seg.points[i],
                               seg.velocities[i], seg.points[i + 1], seg.velocities[i + 1], f);
      }
      if (std::abs(f.determinant()) < singular_det)
        throw NumericalError("lifted frame numerically singular");
      const bool is_left_limit = jump_after && i + 2 == seg.num_nodes();
      if (!is_left_limit) {
        out.times.push_back(seg.times[i + 1]);
        out.nodes.push_back(FramePoint{ChartPoint{seg.points[i + 1]}, f});
      }
    }
    if (jump_after) {
      const FramePoint left{ChartPoint{seg.end_point()}, f};
      const auto pf = transport_segment(m, path.fills[k].curve, singular_det);
      f = m.flat ? f : Eigen::MatrixXd(pf.matrix * f);
      out.left_nodes.push_back(left);
      out.jump_nodes.push_back(static_cast<int>(out.times.size()));
      out.times.push_back(path.jump_times[k]);
      out.nodes.push_back(FramePoint{ChartPoint{path.fills[k].curve.end_point()}, f});
    }
  }
  return out;
}

BundleTangent transport_horizontal(const ManifoldSpec& m, const LiftedPath& lifted,
                                   const PiecewisePath& base_path, double s, double t,
                                   const BundleTangent& w, double horizontal_tol) {
  const FramePoint& from = lifted.nodes[lifted.node_index(s)];
  if (horizontality_residual(m, from, w) > horizontal_tol)
    throw ContractError("transport_horizontal: input vector is not horizontal "
                        "(vertical transport is not implemented)");
  Eigen::VectorXd v_target;
  if (s <= t) {
    const auto p = concat_transport(m, base_path, s, t);
    v_target = p.matrix * w.base_component;
  } else {
    const auto p = concat_transport(m, base_path, t, s);
    v_target = p.matrix.partialPivLu().solve(w.base_component);
  }
  const FramePoint& to = lifted.nodes[lifted.node_index(t)];
  return horizontal_lift_vector(m, to, Tangent{to.base, v_target});
}

SolutionPath solve_lifted_ddej(const EquationSpec& eq, const FramePoint& p0,
                               const DriverPath& driver, const SolverConfig& cfg) {
  if (!eq.manifold.connection.symmetric)
    throw ConfigError("frame-bundle lift requires a torsion-free connection");
  check_base_match(p0.base, ChartPoint{eq.initial_curve.start_point()},
                   "solve_lifted_ddej initial frame");
  SolverConfig c = cfg;
  c.scheme = driver.m == 0 ? Scheme::rk4_deterministic : Scheme::heun_stratonovich;
  return solve_with_frame(eq, driver, c, p0.frame);
}

double check_nablaH_horizontal(const ManifoldSpec& m, const VectorFieldSpec& x_field,
                               const VectorFieldSpec& y_field, const FramePoint& p,
                               double fd_step) {
  if (!m.connection.symmetric)
    throw ConfigError("nabla^H check requires a torsion-free connection");

  // Integral curve of X from the base point over [0, fd_step].
  const int substeps = 32;
  const double dt = fd_step / substeps;
  PathSegment curve;
  Eigen::VectorXd y = p.base.coords;
  auto xrhs = [&](const Eigen::VectorXd& q) {
    return x_field.eval(ChartPoint{q}).components;
  };
  curve.times.push_back(0.0);
  curve.points.push_back(y);
  curve.velocities.push_back(xrhs(y));
  for (int s = 0; s < substeps; ++s) {
    const Eigen::VectorXd k1 = xrhs(y);
    const Eigen::VectorXd k2 = xrhs(y + (0.5 * dt) * k1);
    const Eigen::VectorXd k3 = xrhs(y + (0.5 * dt) * k2);
    const Eigen::VectorXd k4 = xrhs(y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    curve.times.push_back(dt * (s + 1));
    curve.points.push_back(y);
    curve.velocities.push_back(xrhs(y));
  }

  const auto transport = transport_segment(m, curve);
  const FramePoint p_eps{ChartPoint{y}, transport.matrix * p.frame};

  // Y^H at the displaced frame, nabla^H-transported back via the commutation
  // property, differenced against Y^H(p).
  const BundleTangent w_eps =
      horizontal_lift_vector(m, p_eps, y_field.eval(p_eps.base));
  const Eigen::VectorXd v_back = transport.matrix.partialPivLu().solve(w_eps.base_component);
  const BundleTangent back = horizontal_lift_vector(m, p, Tangent{p.base, v_back});
  const BundleTangent y0 = horizontal_lift_vector(m, p, y_field.eval(p.base));

  const Eigen::VectorXd fd_base = (back.base_component - y0.base_component) / fd_step;
  const Eigen::MatrixXd fd_frame = (back.frame_component - y0.frame_component) / fd_step;

  // (nabla_X Y)^H at p from the chart formula X^b d_b Y^a + Gamma^a_{bc} X^b Y^c.
  const Eigen::VectorXd xp = x_field.eval(p.base).components;
  const Eigen::VectorXd yp = y_field.eval(p.base).components;
  const Eigen::VectorXd cov =
      field_jacobian(y_field, p.base) * xp +
      christoffel_contract(m.connection.christoffel(p.base), xp) * yp;
  const BundleTangent lifted = horizontal_lift_vector(m, p, Tangent{p.base, cov});

  const double rb = (fd_base - lifted.base_component).cwiseAbs().maxCoeff();
  const double rf = (fd_frame - lifted.frame_component).cwiseAbs().maxCoeff();
  return std::max(rb, rf);
}

}  // namespace ddej
