#include "transport.hpp"

#include <algorithm>
#include <cmath>

#include "interp.hpp"

namespace ddej {

namespace {

// Grid times carry accumulated rounding (node * h), so boundary queries get a
// small absolute slack.
constexpr double kTimeTol = 1e-9;

// Index i of the interval [times[i], times[i+1]] containing t.
int interval_index(const std::vector<double>& times, double t) {
  if (t < times.front() - kTimeTol || t > times.back() + kTimeTol)
    throw RangeError("time " + std::to_string(t) + " outside segment range [" +
                     std::to_string(times.front()) + ", " + std::to_string(times.back()) + "]");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  int i = static_cast<int>(it - times.begin()) - 1;
  if (i < 0) i = 0;
  if (i >= static_cast<int>(times.size()) - 1) i = static_cast<int>(times.size()) - 2;
  return i;
}

}  // namespace

Eigen::VectorXd PathSegment::value(double t) const {
  if (times.size() == 1) {
    if (t != times[0]) throw RangeError("time outside segment range");
    return points[0];
  }
  const int i = interval_index(times, t);
  if (t == times[i]) return points[i];
  if (t == times[i + 1]) return points[i + 1];
  return hermite_value(times[i], times[i + 1], points[i], velocities[i],
                       points[i + 1], velocities[i + 1], t);
}

Eigen::VectorXd PathSegment::velocity(double t) const {
  if (times.size() == 1) {
    if (t != times[0]) throw RangeError("time outside segment range");
    return velocities[0];
  }
  const int i = interval_index(times, t);
  if (t == times[i]) return velocities[i];
  if (t == times[i + 1]) return velocities[i + 1];
  return hermite_derivative(times[i], times[i + 1], points[i], velocities[i],
                            points[i + 1], velocities[i + 1], t);
}

PathSegment PathSegment::slice(double s, double t) const {
  if (s > t) throw RangeError("slice requires s <= t");
  PathSegment out;
  out.rough = rough;
  out.times.push_back(s);
  out.points.push_back(value(s));
  out.velocities.push_back(velocity(s));
  for (int i = 0; i < num_nodes(); ++i) {
    if (times[i] > s && times[i] < t) {
      out.times.push_back(times[i]);
      out.points.push_back(points[i]);
      out.velocities.push_back(velocities[i]);
    }
  }
  out.times.push_back(t);
  out.points.push_back(value(t));
  out.velocities.push_back(velocity(t));
  return out;
}

PathSegment PathSegment::reversed() const {
  PathSegment out;
  out.rough = rough;
  const int n = num_nodes();
  const double a = times.front(), b = times.back();
  out.times.resize(n);
  out.points.resize(n);
  out.velocities.resize(n);
  for (int i = 0; i < n; ++i) {
    out.times[i] = a + (b - times[n - 1 - i]);
    out.points[i] = points[n - 1 - i];
    out.velocities[i] = -velocities[n - 1 - i];
  }
  return out;
}

void PathSegment::validate() const {
  // A single-node segment is allowed only as the trailing piece after a jump
  // placed exactly at the horizon.
  if (times.empty() || times.size() != points.size() || times.size() != velocities.size())
    throw ContractError("path segment needs equal-length, nonempty times/points/velocities");
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1]) throw ContractError("segment times must strictly increase");
}

PathSegment constant_segment(const Eigen::VectorXd& point, double t0, double t1, int nodes) {
  PathSegment seg;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(point.size());
  for (int i = 0; i < nodes; ++i) {
    seg.times.push_back(t0 + (t1 - t0) * static_cast<double>(i) / (nodes - 1));
    seg.points.push_back(point);
    seg.velocities.push_back(zero);
  }
  return seg;
}

Eigen::VectorXd PiecewisePath::value(double t) const {
  if (t < start_time() - kTimeTol || t > end_time() + kTimeTol)
    throw RangeError("time outside path range");
  // Cadlag: pick the latest segment starting at or before t.
  for (int k = static_cast<int>(segments.size()) - 1; k >= 0; --k) {
    if (segments[k].start_time() <= t) return segments[k].value(t);
  }
  return segments.front().value(t);
}

Eigen::VectorXd PiecewisePath::left_limit(double t) const {
  if (t < start_time() - kTimeTol || t > end_time() + kTimeTol)
    throw RangeError("time outside path range");
  for (size_t k = 0; k < segments.size(); ++k) {
    if (t <= segments[k].end_time() && t >= segments[k].start_time())
      return segments[k].value(t);
  }
  return segments.back().value(t);
}

void PiecewisePath::validate() const {
  if (segments.empty()) throw ContractError("piecewise path needs at least one segment");
  if (fills.size() != jump_times.size())
    throw ContractError("fill count must equal jump count");
  for (auto& s : segments) s.validate();
  const double tol = 1e-12;
  for (size_t j = 0; j < jump_times.size(); ++j) {
    const auto& fill = fills[j];
    fill.curve.validate();
    if (std::abs(fill.curve.start_time()) > tol || std::abs(fill.curve.end_time() - 1.0) > tol)
      throw ContractError("fictitious curve must span [0, 1]");
    if (std::abs(segments[j].end_time() - jump_times[j]) > tol)
      throw ContractError("segment must end at its jump time");
    if ((fill.curve.start_point() - segments[j].end_point()).norm() > tol)
      throw ContractError("fill must start at the pre-jump left limit");
    if ((fill.curve.end_point() - segments[j + 1].start_point()).norm() > tol)
      throw ContractError("fill must end at the post-jump value");
  }
}

Eigen::MatrixXd transport_interval(const ManifoldSpec& m, double t0, double t1,
                                   const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                                   const Eigen::VectorXd& x1, const Eigen::VectorXd& v1,
                                   const Eigen::MatrixXd& e) {
  if (m.flat) return e;
  auto coefficient = [&](double t, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
    ChartPoint p{x};
    if (!m.domain_check(p))
      throw DomainError("path left chart domain during transport", t);
    return christoffel_contract(m.connection.christoffel(p), v);
  };
  const double dt = t1 - t0;
  const double tm = t0 + 0.5 * dt;
  const Eigen::VectorXd xm = hermite_value(t0, t1, x0, v0, x1, v1, tm);
  const Eigen::VectorXd vm = hermite_derivative(t0, t1, x0, v0, x1, v1, tm);
  const Eigen::MatrixXd a0 = coefficient(t0, x0, v0);
  const Eigen::MatrixXd am = coefficient(tm, xm, vm);
  const Eigen::MatrixXd a1 = coefficient(t1, x1, v1);
  const Eigen::MatrixXd k1 = -a0 * e;
  const Eigen::MatrixXd k2 = -am * (e + (0.5 * dt) * k1);
  const Eigen::MatrixXd k3 = -am * (e + (0.5 * dt) * k2);
  const Eigen::MatrixXd k4 = -a1 * (e + dt * k3);
  return e + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

TransportMatrix transport_segment(const ManifoldSpec& m, const PathSegment& seg,
                                  double singular_det) {
  const int n = m.dim;
  TransportMatrix out;
  out.from_point = ChartPoint{seg.start_point()};
  out.to_point = ChartPoint{seg.end_point()};

  if (m.flat) {
    out.matrix = Eigen::MatrixXd::Identity(n, n);
    return out;
  }

  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i + 1 < seg.num_nodes(); ++i) {
    if (seg.rough) {
      // Chordwise traversal: matching endpoint slopes collapse the Hermite
      // cubic to the straight line between the nodes.
      const Eigen::VectorXd chord =
          (seg.points[i + 1] - seg.points[i]) / (seg.times[i + 1] - seg.times[i]);
      e = transport_interval(m, seg.times[i], seg.times[i + 1], seg.points[i], chord,
                             seg.points[i + 1], chord, e);
    } else {
      e = transport_interval(m, seg.times[i], seg.times[i + 1], seg.points[i],
                             seg.velocities[i], seg.points[i + 1], seg.velocities[i + 1], e);
    }
  }

  if (std::abs(e.determinant()) < singular_det)
    throw NumericalError("transport matrix numerically singular");
  out.matrix = std::move(e);
  return out;
}

TransportMatrix concat_transport(const ManifoldSpec& m, const PiecewisePath& path,
                                 double s, double t, double singular_det) {
  if (s > t) throw RangeError("concat_transport requires s <= t");
  if (s < path.start_time() - kTimeTol || t > path.end_time() + kTimeTol)
    throw RangeError("transport window outside path range");

  const int n = m.dim;
  TransportMatrix out;
  out.from_point = ChartPoint{path.value(s)};
  out.to_point = ChartPoint{path.value(t)};
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(n, n);
  if (t - s <= kTimeTol) {
    out.matrix = acc;
    return out;
  }

  // Jumps in the window (s, t], with slack for grid-time rounding.
  double cur = s;
  for (size_t j = 0; j < path.jump_times.size(); ++j) {
    const double tj = path.jump_times[j];
    if (tj <= s + kTimeTol) continue;
    if (tj > t + kTimeTol) break;
    if (cur < tj - kTimeTol) {
      const auto p = transport_segment(m, path.segments[j].slice(cur, tj), singular_det);
      acc = p.matrix * acc;
    }
    const auto pf = transport_segment(m, path.fills[j].curve, singular_det);
    acc = pf.matrix * acc;
    cur = tj;
  }
  if (cur < t - kTimeTol) {
    // Segment holding the cadlag piece that starts at cur.
    int k = static_cast<int>(path.segments.size()) - 1;
    while (k > 0 && path.segments[k].start_time() > cur) --k;
    const auto p = transport_segment(m, path.segments[k].slice(cur, t), singular_det);
    acc = p.matrix * acc;
  }
  out.matrix = std::move(acc);
  return out;
}

Tangent transport_vector(const TransportMatrix& p, const Tangent& v) {
  if ((v.base.coords - p.from_point.coords).norm() > 1e-9)
    throw ContractError("transport_vector: vector base does not match transport source");
  Tangent out;
  out.base = p.to_point;
  out.components = p.matrix * v.components;
  return out;
}

}  // namespace ddej
