#include "solver.hpp"

#include <cmath>
#include <map>

#include "interp.hpp"

namespace ddej {

namespace {

constexpr double kNodeTol = 1e-9;

int exact_multiple(double value, double h, const char* what) {
  const double ratio = value / h;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > kNodeTol)
    throw ConfigError(std::string(what) + " must be a positive multiple of the step h");
  return static_cast<int>(n);
}

struct Deriv {
  Eigen::VectorXd xdot;
  Eigen::MatrixXd edot;
};

// Projection of the running frame onto metric isometries T_from -> T_to:
// with g = L L^T at both ends, Q = Lc^T U Ls^{-T} must be orthogonal; replace
// Q by its polar factor.
Eigen::MatrixXd project_isometry(const Eigen::MatrixXd& g_from, const Eigen::MatrixXd& g_to,
                                 const Eigen::MatrixXd& u) {
  const Eigen::MatrixXd ls = Eigen::LLT<Eigen::MatrixXd>(g_from).matrixL();
  const Eigen::MatrixXd lc = Eigen::LLT<Eigen::MatrixXd>(g_to).matrixL();
  const Eigen::MatrixXd q = lc.transpose() * u * ls.transpose().inverse();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd polar = svd.matrixU() * svd.matrixV().transpose();
  return lc.transpose().inverse() * polar * ls.transpose();
}

class Engine {
 public:
  Engine(const EquationSpec& eq, const DriverPath& driver, const SolverConfig& cfg,
         Eigen::MatrixXd initial_frame)
      : eq_(eq), driver_(driver), cfg_(cfg), n_(eq.manifold.dim), flat_(eq.manifold.flat) {
    validate();
    delay_steps_ = exact_multiple(eq_.delay, cfg_.step, "delay d");
    horizon_steps_ = exact_multiple(cfg_.horizon, cfg_.step, "horizon T");
    total_ = delay_steps_ + horizon_steps_;
    h_ = cfg_.step;
    u0_ = std::move(initial_frame);
    if (std::abs(u0_.determinant()) < cfg_.singular_det)
      throw ConfigError("initial frame is numerically singular");
  }

  SolutionPath run() {
    init_history();
    index_jumps();
    const int scheme_is_rk4 = cfg_.scheme == Scheme::rk4_deterministic;
    for (int j = delay_steps_; j <= total_; ++j) {
      if (auto it = jumps_.find(j); it != jumps_.end()) apply_jump(j, it->second);
      if (j == total_) break;
      if (scheme_is_rk4)
        rk4_step(j);
      else
        heun_step(j);
      if (cfg_.metric_projection && eq_.manifold.metric) {
        const auto& metric = *eq_.manifold.metric;
        us_[j + 1] = project_isometry(metric(ChartPoint{xs_[0]}),
                                      metric(ChartPoint{xs_[j + 1]}), us_[j + 1]);
      }
    }
    return assemble();
  }

 private:
  void validate() {
    if (eq_.delay <= 0.0) throw ConfigError("delay d must be positive");
    if (static_cast<int>(eq_.fields.size()) != driver_.m + 1)
      throw ConfigError("need m + 1 vector fields for a driver with m Brownian components");
    if (std::abs(driver_.h - cfg_.step) > kNodeTol ||
        std::abs(driver_.horizon - cfg_.horizon) > kNodeTol)
      throw ConfigError("driver grid does not match solver grid");
    eq_.initial_curve.validate();
    if (std::abs(eq_.initial_curve.start_time() + eq_.delay) > kNodeTol ||
        std::abs(eq_.initial_curve.end_time()) > kNodeTol)
      throw ConfigError("initial curve must span exactly [-d, 0]");
    if (eq_.delay > 1.0 + kNodeTol)
      warnings_.push_back("delay d outside (0, 1]; construction proceeds unchanged");
  }

  double node_time(int j) const { return -eq_.delay + h_ * j; }

  Eigen::MatrixXd coefficient(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
    return christoffel_contract(eq_.manifold.connection.christoffel(ChartPoint{x}), v);
  }

  void check_domain(const Eigen::VectorXd& x, double tau) const {
    if (!eq_.manifold.domain_check(ChartPoint{x}))
      throw DomainError("solution left chart domain", tau);
  }

  void init_history() {
    xs_.resize(total_ + 1);
    vs_.resize(total_ + 1);
    us_.resize(total_ + 1);
    uds_.resize(total_ + 1);
    for (int j = 0; j <= delay_steps_; ++j) {
      const double t = node_time(j);
      xs_[j] = eq_.initial_curve.value(t);
      vs_[j] = eq_.initial_curve.velocity(t);
      check_domain(xs_[j], t);
    }
    us_[0] = u0_;
    for (int j = 0; j < delay_steps_; ++j) {
      uds_[j] = frame_deriv(xs_[j], vs_[j], us_[j]);
      us_[j + 1] = flat_ ? us_[j]
                         : transport_interval(eq_.manifold, node_time(j), node_time(j + 1),
                                              xs_[j], vs_[j], xs_[j + 1], vs_[j + 1], us_[j]);
    }
    uds_[delay_steps_] = frame_deriv(xs_[delay_steps_], vs_[delay_steps_], us_[delay_steps_]);
    if (cfg_.scheme == Scheme::rk4_deterministic) {
      // The path generally kinks at t = 0: the left derivative is the initial
      // curve's own velocity, the right derivative is the equation RHS. Keep
      // the curve-side data as a left override so history reads on [-h, 0]
      // stay exact, then store the RHS as the node derivative for stepping.
      left_at_[delay_steps_] =
          Left{xs_[delay_steps_], vs_[delay_steps_], us_[delay_steps_], uds_[delay_steps_]};
      const Deriv d0 = rhs(0.0, xs_[delay_steps_], us_[delay_steps_]);
      vs_[delay_steps_] = d0.xdot;
      uds_[delay_steps_] = d0.edot;
    }
  }

  Eigen::MatrixXd frame_deriv(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                              const Eigen::MatrixXd& u) const {
    if (flat_) return Eigen::MatrixXd::Zero(n_, n_);
    return -coefficient(x, v) * u;
  }

  void index_jumps() {
    const auto& sched = driver_.schedule;
    for (size_t k = 0; k < sched.times.size(); ++k) {
      if (static_cast<int>(sched.marks[k].size()) != driver_.m + 1)
        throw ConfigError("jump mark length must be m + 1");
      const double pos = sched.times[k] / h_;
      const int node = delay_steps_ + static_cast<int>(std::llround(pos));
      if (std::abs(pos - std::llround(pos)) > kNodeTol)
        throw ConfigError("jump times must sit on grid nodes (snap the schedule first)");
      if (node <= delay_steps_ || node > total_)
        throw ConfigError("jump time outside (0, T]");
      jumps_[node] = static_cast<int>(k);
    }
  }

  // --- history reads (cadlag at nodes, Hermite inside intervals) ---

  Eigen::VectorXd hist_x(double tau) const {
    const double pos = (tau + eq_.delay) / h_;
    const long long jn = std::llround(pos);
    if (std::abs(pos - static_cast<double>(jn)) < kNodeTol) return xs_[jn];
    const int j = static_cast<int>(std::floor(pos));
    const auto [xr, vr] = right_node_left_values(j + 1);
    return hermite_value(node_time(j), node_time(j + 1), xs_[j], vs_[j], xr, vr, tau);
  }

  Eigen::MatrixXd hist_u(double tau) const {
    const double pos = (tau + eq_.delay) / h_;
    const long long jn = std::llround(pos);
    if (std::abs(pos - static_cast<double>(jn)) < kNodeTol) return us_[jn];
    const int j = static_cast<int>(std::floor(pos));
    const auto [ur, udr] = right_node_left_frames(j + 1);
    return hermite_value(node_time(j), node_time(j + 1), us_[j], uds_[j], ur, udr, tau);
  }

  std::pair<const Eigen::VectorXd&, const Eigen::VectorXd&> right_node_left_values(int j) const {
    if (auto it = left_at_.find(j); it != left_at_.end())
      return {it->second.x, it->second.v};
    return {xs_[j], vs_[j]};
  }

  std::pair<const Eigen::MatrixXd&, const Eigen::MatrixXd&> right_node_left_frames(int j) const {
    if (auto it = left_at_.find(j); it != left_at_.end())
      return {it->second.u, it->second.ud};
    return {us_[j], uds_[j]};
  }

  // --- RK4 (deterministic, m = 0) ---

  Deriv rhs(double tau, const Eigen::VectorXd& x, const Eigen::MatrixXd& e) const {
    check_domain(x, tau);
    const Eigen::VectorXd xd = hist_x(tau - eq_.delay);
    const Eigen::VectorXd f = eq_.fields[0].eval(ChartPoint{xd}).components;
    if (flat_) return {f, Eigen::MatrixXd::Zero(n_, n_)};
    const Eigen::MatrixXd hd = hist_u(tau - eq_.delay);
    const Eigen::VectorXd v = e * hd.partialPivLu().solve(f);
    return {v, -coefficient(x, v) * e};
  }

  void rk4_step(int j) {
    const double t = node_time(j);
    const Eigen::VectorXd& x = xs_[j];
    const Eigen::MatrixXd& e = us_[j];
    const Deriv k1{vs_[j], uds_[j]};  // RHS at the node, cached
    const Deriv k2 = rhs(t + 0.5 * h_, x + (0.5 * h_) * k1.xdot, e + (0.5 * h_) * k1.edot);
    const Deriv k3 = rhs(t + 0.5 * h_, x + (0.5 * h_) * k2.xdot, e + (0.5 * h_) * k2.edot);
    const Deriv k4 = rhs(t + h_, x + h_ * k3.xdot, e + h_ * k3.edot);
    xs_[j + 1] = x + (h_ / 6.0) * (k1.xdot + 2.0 * k2.xdot + 2.0 * k3.xdot + k4.xdot);
    us_[j + 1] = e + (h_ / 6.0) * (k1.edot + 2.0 * k2.edot + 2.0 * k3.edot + k4.edot);
    check_domain(xs_[j + 1], t + h_);
    check_frame(us_[j + 1]);
    const Deriv dn = rhs(t + h_, xs_[j + 1], us_[j + 1]);
    vs_[j + 1] = dn.xdot;
    uds_[j + 1] = dn.edot;
  }

  // --- Heun (Stratonovich, m >= 0) ---

  void heun_step(int j) {
    const double t = node_time(j);
    const int m = driver_.m;
    const Eigen::VectorXd& x = xs_[j];
    const Eigen::MatrixXd& u = us_[j];
    const int jd = j - delay_steps_;
    const Eigen::VectorXd& xd = xs_[jd];

    Eigen::VectorXd dl(m + 1);
    dl[0] = h_;
    if (m > 0) dl.tail(m) = driver_.increments[j - delay_steps_];

    // Delayed coefficients: w_i = U(t-d)^{-1} A_i(x(t-d)), frozen within the step.
    std::vector<Eigen::VectorXd> w(m + 1);
    if (flat_) {
      for (int i = 0; i <= m; ++i) w[i] = eq_.fields[i].eval(ChartPoint{xd}).components;
    } else {
      const auto lu = us_[jd].partialPivLu();
      if (std::abs(us_[jd].determinant()) < cfg_.singular_det)
        throw NumericalError("delayed frame numerically singular");
      for (int i = 0; i <= m; ++i)
        w[i] = lu.solve(eq_.fields[i].eval(ChartPoint{xd}).components);
    }

    Eigen::VectorXd dx_pred = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i <= m; ++i) dx_pred += dl[i] * (flat_ ? w[i] : Eigen::VectorXd(u * w[i]));

    Eigen::VectorXd x_new;
    if (flat_) {
      x_new = x + dx_pred;  // coefficients depend on history only
    } else {
      const Eigen::MatrixXd u_pred = u - coefficient(x, dx_pred) * u;
      Eigen::VectorXd incr = Eigen::VectorXd::Zero(n_);
      for (int i = 0; i <= m; ++i) incr += (0.5 * dl[i]) * Eigen::VectorXd(u * w[i] + u_pred * w[i]);
      x_new = x + incr;
    }
    check_domain(x_new, t + h_);
    xs_[j + 1] = x_new;
    if (flat_) {
      us_[j + 1] = u;
    } else {
      const Eigen::VectorXd dx = x_new - x;
      const Eigen::MatrixXd k1 = -coefficient(x, dx) * u;
      const Eigen::MatrixXd k2 = -coefficient(x_new, dx) * (u + k1);
      us_[j + 1] = u + 0.5 * (k1 + k2);
      check_frame(us_[j + 1]);
    }
    // Node velocities for Heun paths are assigned per segment afterwards.
    vs_[j + 1] = Eigen::VectorXd::Zero(n_);
    uds_[j + 1] = frame_deriv(xs_[j + 1], vs_[j + 1], us_[j + 1]);
  }

  void check_frame(const Eigen::MatrixXd& u) const {
    if (std::abs(u.determinant()) < cfg_.singular_det)
      throw NumericalError("running frame numerically singular");
  }

  // --- jumps ---

  struct Left {
    Eigen::VectorXd x, v;
    Eigen::MatrixXd u, ud;
  };

  void apply_jump(int node, int sched_index) {
    const double tj = node_time(node);
    const Eigen::VectorXd& mark = driver_.schedule.marks[sched_index];
    Left left{xs_[node], vs_[node], us_[node], uds_[node]};
    JumpFill fill;
    try {
      fill = marcus_jump(eq_.manifold, eq_.fields, mark, ChartPoint{xs_[node]},
                         cfg_.fictitious_steps);
    } catch (const DomainError& e) {
      throw DomainError("fictitious flow left chart domain at jump " +
                            std::to_string(sched_index + 1) + ": " + e.what(),
                        tj);
    }
    fill.jump_index = static_cast<int>(applied_fills_.size()) + 1;

    xs_[node] = fill.curve.end_point();
    if (!flat_) {
      const auto p = transport_segment(eq_.manifold, fill.curve, cfg_.singular_det);
      us_[node] = p.matrix * us_[node];
      check_frame(us_[node]);
    }
    if (cfg_.scheme == Scheme::rk4_deterministic) {
      const Deriv dn = rhs(tj, xs_[node], us_[node]);
      vs_[node] = dn.xdot;
      uds_[node] = dn.edot;
    } else {
      vs_[node] = Eigen::VectorXd::Zero(n_);
      uds_[node] = frame_deriv(xs_[node], vs_[node], us_[node]);
    }
    left_at_[node] = left;
    applied_fills_.push_back(std::move(fill));
    applied_jump_nodes_.push_back(node);
  }

  // --- output ---

  SolutionPath assemble() {
    SolutionPath sol;
    sol.h = h_;
    sol.delay_steps = delay_steps_;
    sol.driver = driver_;
    sol.warnings = warnings_;
    sol.grid.resize(total_ + 1);
    for (int j = 0; j <= total_; ++j) sol.grid[j] = node_time(j);

    // Segment boundaries at jump nodes; left values close each segment.
    std::vector<int> bounds;
    bounds.push_back(0);
    for (int node : applied_jump_nodes_) bounds.push_back(node);
    bounds.push_back(total_);

    const bool chord_velocities = cfg_.scheme != Scheme::rk4_deterministic;
    for (size_t k = 0; k + 1 < bounds.size(); ++k) {
      const int a = bounds[k], b = bounds[k + 1];
      PathSegment seg;
      seg.rough = chord_velocities;
      for (int j = a; j <= b; ++j) {
        seg.times.push_back(node_time(j));
        if (j == b && k + 2 < bounds.size()) {
          const auto& left = left_at_.at(b);
          seg.points.push_back(left.x);
          seg.velocities.push_back(left.v);
        } else {
          seg.points.push_back(xs_[j]);
          seg.velocities.push_back(vs_[j]);
        }
      }
      if (chord_velocities && seg.num_nodes() >= 2) assign_chords(seg, a);
      sol.path.segments.push_back(std::move(seg));
      if (k + 2 < bounds.size()) sol.path.jump_times.push_back(node_time(b));
    }
    sol.path.fills = applied_fills_;

    // Propagate chord velocities back into the node arrays.
    if (chord_velocities) {
      size_t seg_idx = 0;
      for (size_t k = 0; k + 1 < bounds.size(); ++k, ++seg_idx) {
        const auto& seg = sol.path.segments[seg_idx];
        for (int j = bounds[k], i = 0; j <= bounds[k + 1]; ++j, ++i) {
          if (j == bounds[k + 1] && k + 2 < bounds.size()) {
            left_at_.at(j).v = seg.velocities[i];
          } else {
            vs_[j] = seg.velocities[i];
          }
        }
      }
      for (int j = 0; j <= total_; ++j) uds_[j] = frame_deriv(xs_[j], vs_[j], us_[j]);
    }

    sol.values = std::move(xs_);
    sol.frames = std::move(us_);
    sol.frame_derivs = std::move(uds_);
    sol.jump_nodes = applied_jump_nodes_;
    for (int node : applied_jump_nodes_) {
      sol.left_values.push_back(left_at_.at(node).x);
      sol.left_frames.push_back(left_at_.at(node).u);
    }
    return sol;
  }

  // Symmetric-difference velocities for stochastic segments (the stored grid
  // values are the only meaningful data; one-sided chords at the ends).
  void assign_chords(PathSegment& seg, int /*first_node*/) const {
    const int k = seg.num_nodes();
    seg.velocities[0] = (seg.points[1] - seg.points[0]) / h_;
    seg.velocities[k - 1] = (seg.points[k - 1] - seg.points[k - 2]) / h_;
    for (int i = 1; i + 1 < k; ++i)
      seg.velocities[i] = (seg.points[i + 1] - seg.points[i - 1]) / (2.0 * h_);
  }

  EquationSpec eq_;
  DriverPath driver_;
  SolverConfig cfg_;
  int n_;
  bool flat_;
  double h_ = 0.0;
  int delay_steps_ = 0, horizon_steps_ = 0, total_ = 0;
  Eigen::MatrixXd u0_;
  std::vector<Eigen::VectorXd> xs_, vs_;
  std::vector<Eigen::MatrixXd> us_, uds_;
  std::map<int, int> jumps_;  // node -> schedule index
  std::map<int, Left> left_at_;
  std::vector<JumpFill> applied_fills_;
  std::vector<int> applied_jump_nodes_;
  std::vector<std::string> warnings_;
};

}  // namespace

int SolutionPath::node_index(double t) const {
  const double pos = (t - grid.front()) / h;
  const long long j = std::llround(pos);
  if (j < 0 || j >= static_cast<long long>(grid.size()) ||
      std::abs(pos - static_cast<double>(j)) > 1e-6)
    throw RangeError("time " + std::to_string(t) + " is not a grid node of the solution");
  return static_cast<int>(j);
}

JumpFill marcus_jump(const ManifoldSpec& m, const std::vector<VectorFieldSpec>& fields,
                     const Eigen::VectorXd& mark, const ChartPoint& z, int steps) {
  if (mark.size() != static_cast<Eigen::Index>(fields.size()))
    throw ContractError("jump mark length must equal the number of fields");
  if (steps < 1) throw ConfigError("fictitious flow needs at least one step");
  if (!m.domain_check(z)) throw DomainError("jump start point outside chart domain", 0.0);

  auto rhs = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m.dim);
    for (size_t k = 0; k < fields.size(); ++k) {
      if (mark[static_cast<Eigen::Index>(k)] == 0.0) continue;
      out += mark[static_cast<Eigen::Index>(k)] *
             fields[k].eval(ChartPoint{y}).components;
    }
    return out;
  };

  const double dt = 1.0 / steps;
  JumpFill fill;
  Eigen::VectorXd y = z.coords;
  fill.curve.times.push_back(0.0);
  fill.curve.points.push_back(y);
  fill.curve.velocities.push_back(rhs(y));
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd k1 = rhs(y);
    const Eigen::VectorXd k2 = rhs(y + (0.5 * dt) * k1);
    const Eigen::VectorXd k3 = rhs(y + (0.5 * dt) * k2);
    const Eigen::VectorXd k4 = rhs(y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double tau = dt * (s + 1);
    if (!m.domain_check(ChartPoint{y}))
      throw DomainError("fictitious flow left chart domain", tau);
    fill.curve.times.push_back(s + 1 == steps ? 1.0 : tau);
    fill.curve.points.push_back(y);
    fill.curve.velocities.push_back(rhs(y));
  }
  return fill;
}

Tangent delayed_vector(const ManifoldSpec& m, const std::vector<VectorFieldSpec>& fields,
                       const SolutionPath& sol, double t, int i) {
  if (i < 0 || i >= static_cast<int>(fields.size()))
    throw ContractError("field index out of range");
  const int j = sol.node_index(t);
  const int jd = j - sol.delay_steps;
  if (jd < 0) throw RangeError("delayed time before the initial-curve start");
  const Eigen::VectorXd f = fields[i].eval(ChartPoint{sol.values[jd]}).components;
  Tangent out;
  out.base = ChartPoint{sol.values[j]};
  if (m.flat) {
    out.components = f;
    return out;
  }
  if (std::abs(sol.frames[jd].determinant()) < 1e-12)
    throw NumericalError("delayed frame numerically singular");
  out.components = sol.frames[j] * sol.frames[jd].partialPivLu().solve(f);
  return out;
}

SolutionPath solve_ddej(const EquationSpec& eq, const DriverPath& driver,
                        const SolverConfig& cfg) {
  if (driver.m != 0) throw ConfigError("solve_ddej requires a deterministic driver (m = 0)");
  SolverConfig c = cfg;
  c.scheme = Scheme::rk4_deterministic;
  return Engine(eq, driver, c, Eigen::MatrixXd::Identity(eq.manifold.dim, eq.manifold.dim)).run();
}

SolutionPath solve_sddej(const EquationSpec& eq, const DriverPath& driver,
                         const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.scheme = Scheme::heun_stratonovich;
  return Engine(eq, driver, c, Eigen::MatrixXd::Identity(eq.manifold.dim, eq.manifold.dim)).run();
}

SolutionPath solve_with_frame(const EquationSpec& eq, const DriverPath& driver,
                              const SolverConfig& cfg, const Eigen::MatrixXd& initial_frame) {
  return Engine(eq, driver, cfg, initial_frame).run();
}

}  // namespace ddej
