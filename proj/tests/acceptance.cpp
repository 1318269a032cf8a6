// Acceptance gate: one line per criterion, nonzero exit on any failure.

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "fields.hpp"
#include "frame_bundle.hpp"
#include "reference_flat.hpp"
#include "run.hpp"
#include "solver.hpp"

using namespace ddej;

namespace {

int g_failures = 0;

void report(int criterion, const char* what, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what,
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

struct FlatConfig {
  int dim = 1;
  int m = 0;
  double d = 0.5, h = 0.05;
  std::vector<Eigen::MatrixXd> mats;
  std::vector<Eigen::VectorXd> offs;
  Eigen::VectorXd x0;
  JumpSchedule schedule;
  std::uint64_t bm_seed = 0;
};

FlatConfig random_flat_config(std::mt19937_64& rng, int index) {
  std::uniform_int_distribution<int> dim_pick(1, 3);
  std::uniform_real_distribution<double> coeff(-0.4, 0.4);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> jump_count(0, 2);

  FlatConfig c;
  c.dim = dim_pick(rng);
  c.m = (index % 2 == 1) ? 1 + (index / 2) % 2 : 0;
  c.d = (index % 3 == 0) ? 0.25 : 0.5;
  c.h = (index % 4 < 2) ? 0.05 : 0.025;
  c.bm_seed = derive_seed(1001, index);
  for (int i = 0; i <= c.m; ++i) {
    Eigen::MatrixXd m(c.dim, c.dim);
    Eigen::VectorXd b(c.dim);
    for (int r = 0; r < c.dim; ++r) {
      b[r] = 0.3 * coeff(rng);
      for (int cc = 0; cc < c.dim; ++cc) m(r, cc) = coeff(rng);
    }
    c.mats.push_back(m);
    c.offs.push_back(b);
  }
  c.x0 = Eigen::VectorXd::NullaryExpr(c.dim, [&](Eigen::Index) { return unit(rng); });

  const int steps = static_cast<int>(std::llround(1.0 / c.h));
  std::uniform_int_distribution<int> node(1, steps - 1);
  std::vector<int> nodes;
  for (int k = jump_count(rng); k > 0; --k) nodes.push_back(node(rng));
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  for (int n : nodes) {
    c.schedule.times.push_back(n * c.h);
    Eigen::VectorXd mark(c.m + 1);
    for (int i = 0; i <= c.m; ++i) mark[i] = unit(rng);
    c.schedule.marks.push_back(mark);
  }
  return c;
}

double flat_oracle_diff(const FlatConfig& c) {
  EquationSpec eq;
  eq.manifold = builtin_manifold("euclidean", c.dim);
  for (int i = 0; i <= c.m; ++i) eq.fields.push_back(linear_field(c.mats[i], c.offs[i]));
  eq.delay = c.d;
  eq.initial_curve = constant_segment(c.x0, -c.d, 0.0);
  SolverConfig cfg;
  cfg.step = c.h;
  cfg.horizon = 1.0;

  DriverPath driver;
  if (c.m == 0) {
    driver = deterministic_integrator(c.schedule, 1.0, c.h);
  } else {
    driver = sample_brownian(c.bm_seed, c.h, 1.0, c.m);
    driver.schedule = snap_schedule(c.schedule, c.h, 1.0);
  }
  SolutionPath sol =
      c.m == 0 ? solve_ddej(eq, driver, cfg) : solve_sddej(eq, driver, cfg);

  std::vector<refflat::Field> fields;
  for (int i = 0; i <= c.m; ++i) {
    const Eigen::MatrixXd m = c.mats[i];
    const Eigen::VectorXd b = c.offs[i];
    fields.push_back([m, b, dim = c.dim](const refflat::Vec& x) {
      refflat::Vec out(dim);
      for (int r = 0; r < dim; ++r) {
        double s = b[r];
        for (int cc = 0; cc < dim; ++cc) s += m(r, cc) * x[cc];
        out[r] = s;
      }
      return out;
    });
  }
  refflat::Vec x0(c.x0.data(), c.x0.data() + c.dim);
  std::vector<refflat::Jump> jumps;
  for (std::size_t k = 0; k < driver.schedule.times.size(); ++k) {
    refflat::Jump j;
    j.time = driver.schedule.times[k];
    const Eigen::VectorXd& mk = driver.schedule.marks[k];
    j.mark.assign(mk.data(), mk.data() + mk.size());
    jumps.push_back(j);
  }
  refflat::Result ref;
  if (c.m == 0) {
    ref = refflat::solve_rk4(c.dim, fields[0], c.d, 1.0, c.h, x0, jumps,
                             cfg.fictitious_steps);
  } else {
    std::vector<refflat::Vec> inc;
    for (const auto& dw : driver.increments) inc.emplace_back(dw.data(), dw.data() + c.m);
    ref = refflat::solve_heun(c.dim, fields, c.d, 1.0, c.h, x0, inc, jumps,
                              cfg.fictitious_steps);
  }

  double worst = 0.0;
  for (int j = 0; j < sol.num_nodes(); ++j)
    for (int i = 0; i < c.dim; ++i)
      worst = std::max(worst, std::abs(sol.values[j][i] - ref.values[j][i]));
  return worst;
}

void criterion1() {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i)
    worst = std::max(worst, flat_oracle_diff(random_flat_config(rng, i)));
  report(1, "flat-space oracle equivalence over 20 random configs", worst <= 1e-9,
         "max " + num(worst) + " <= 1e-9");
}

// ---------------------------------------------------------------- criterion 2

PathSegment sampled_curve(const std::function<Eigen::Vector2d(double)>& pos,
                          const std::function<Eigen::Vector2d(double)>& vel, double t0,
                          double t1, int nodes) {
  PathSegment seg;
  for (int i = 0; i < nodes; ++i) {
    const double t = t0 + (t1 - t0) * i / (nodes - 1);
    seg.times.push_back(t);
    seg.points.push_back(pos(t));
    seg.velocities.push_back(vel(t));
  }
  return seg;
}

double isometry_defect(const ManifoldSpec& m, const PathSegment& seg) {
  const TransportMatrix p = transport_segment(m, seg);
  const Eigen::MatrixXd g0 = (*m.metric)(p.from_point);
  const Eigen::MatrixXd g1 = (*m.metric)(p.to_point);
  return (p.matrix.transpose() * g1 * p.matrix - g0).cwiseAbs().maxCoeff();
}

void criterion2() {
  const ManifoldSpec sphere = builtin_manifold("sphere2");
  const ManifoldSpec hp = builtin_manifold("halfplane");
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> amp(0.1, 0.45);
  std::uniform_real_distribution<double> rate(0.3, 1.2);

  double iso = 0.0, coc = 0.0, rev = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double a = amp(rng), b = rate(rng);
    PathSegment cs = sampled_curve(
        [=](double t) { return Eigen::Vector2d(1.1 + a * std::sin(2.0 * t), b * t); },
        [=](double t) { return Eigen::Vector2d(2.0 * a * std::cos(2.0 * t), b); }, 0.0, 2.0,
        801);
    PathSegment ch = sampled_curve(
        [=](double t) { return Eigen::Vector2d(std::sin(b * t), 1.5 + a * std::cos(t)); },
        [=](double t) { return Eigen::Vector2d(b * std::cos(b * t), -a * std::sin(t)); },
        0.0, 2.0, 801);
    for (const auto* pair : {&cs, &ch}) {
      const ManifoldSpec& m = (pair == &cs) ? sphere : hp;
      iso = std::max(iso, isometry_defect(m, *pair));
      const Eigen::MatrixXd full = transport_segment(m, *pair).matrix;
      const Eigen::MatrixXd head = transport_segment(m, pair->slice(0.0, 0.8)).matrix;
      const Eigen::MatrixXd tail = transport_segment(m, pair->slice(0.8, 2.0)).matrix;
      coc = std::max(coc, (tail * head - full).cwiseAbs().maxCoeff());
      const Eigen::MatrixXd back = transport_segment(m, pair->reversed()).matrix;
      rev = std::max(rev,
                     (back * full - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
    }
  }

  // Cocycle across jumps on a solver-produced cadlag path.
  EquationSpec eq;
  eq.manifold = sphere;
  eq.fields = {constant_field(Eigen::Vector2d(0.05, 0.3))};
  eq.delay = 0.5;
  eq.initial_curve = constant_segment(Eigen::Vector2d(1.0, 0.0), -0.5, 0.0);
  JumpSchedule s;
  s.times = {0.6, 1.3};
  Eigen::VectorXd mk(1);
  mk << 1.0;
  s.marks = {mk, mk};
  SolverConfig cfg;
  cfg.step = 0.01;
  cfg.horizon = 2.0;
  SolutionPath sol = solve_ddej(eq, deterministic_integrator(s, 2.0, 0.01), cfg);
  const Eigen::MatrixXd su = concat_transport(sphere, sol.path, 0.2, 1.8).matrix;
  const Eigen::MatrixXd st = concat_transport(sphere, sol.path, 0.2, 0.9).matrix;
  const Eigen::MatrixXd tu = concat_transport(sphere, sol.path, 0.9, 1.8).matrix;
  coc = std::max(coc, (tu * st - su).cwiseAbs().maxCoeff());

  const bool pass = iso <= 1e-6 && coc <= 1e-8 && rev <= 1e-8;
  report(2, "transport isometry / cocycle / reversal", pass,
         "isometry " + num(iso) + " <= 1e-6, cocycle " + num(coc) +
             " <= 1e-8, reversal " + num(rev) + " <= 1e-8");
}

// ---------------------------------------------------------------- criterion 3

double holonomy_error(int intervals) {
  const ManifoldSpec m = builtin_manifold("sphere2");
  const double theta = M_PI / 3.0;
  PathSegment loop = sampled_curve(
      [=](double t) { return Eigen::Vector2d(theta, 2.0 * M_PI * t); },
      [=](double) { return Eigen::Vector2d(0.0, 2.0 * M_PI); }, 0.0, 1.0, intervals + 1);
  const TransportMatrix p = transport_segment(m, loop);
  const double s = std::sin(theta);
  Eigen::Matrix2d l;
  l << 1.0, 0.0, 0.0, s;
  const Eigen::Matrix2d o = l.transpose() * p.matrix * l.transpose().inverse();
  return std::abs(std::abs(std::atan2(o(1, 0), o(0, 0))) - M_PI);
}

void criterion3() {
  const double err = holonomy_error(10000);
  double min_slope = 100.0;
  double prev = holonomy_error(64);
  for (int n : {128, 256, 512}) {
    const double cur = holonomy_error(n);
    min_slope = std::min(min_slope, std::log2(prev / cur));
    prev = cur;
  }
  const bool pass = err <= 1e-6 && min_slope >= 3.0;
  report(3, "latitude-loop holonomy and refinement order", pass,
         "|angle - pi| " + num(err) + " <= 1e-6, order " + num(min_slope) + " >= 3");
}

// ---------------------------------------------------------------- criterion 4

void criterion4() {
  const ManifoldSpec sphere = builtin_manifold("sphere2");
  EquationSpec eq;
  eq.manifold = sphere;
  eq.fields = {constant_field(Eigen::Vector2d(0.05, 0.25))};
  eq.delay = 0.5;
  eq.initial_curve = constant_segment(Eigen::Vector2d(1.0, 0.0), -0.5, 0.0);
  JumpSchedule s;
  s.times = {0.7, 1.5};
  Eigen::VectorXd mk(1);
  mk << 1.2;
  s.marks = {mk, mk};
  SolverConfig cfg;
  cfg.step = 0.01;
  cfg.horizon = 2.0;
  SolutionPath sol = solve_ddej(eq, deterministic_integrator(s, 2.0, 0.01), cfg);

  double fill_err = 0.0;
  bool spans = true;
  for (std::size_t k = 0; k < sol.path.fills.size(); ++k) {
    const auto& curve = sol.path.fills[k].curve;
    spans = spans && curve.start_time() == 0.0 && curve.end_time() == 1.0;
    fill_err = std::max(fill_err, (curve.start_point() - sol.left_values[k]).norm());
    fill_err =
        std::max(fill_err, (curve.end_point() - sol.values[sol.jump_nodes[k]]).norm());
  }
  bool valid = true;
  try {
    sol.path.validate();
  } catch (const Error&) {
    valid = false;
  }

  const Eigen::Vector2d z(1.2, 0.4);
  JumpFill zero = marcus_jump(sphere, eq.fields, Eigen::VectorXd::Zero(1), ChartPoint{z},
                              cfg.fictitious_steps);
  const double zero_err = (zero.curve.end_point() - z).cwiseAbs().maxCoeff();

  Eigen::Matrix2d m0, m1;
  m0 << 0.2, -1.0, 0.5, 0.1;
  m1 << 0.0, 0.7, -0.7, 0.0;
  std::vector<VectorFieldSpec> lin{linear_field(m0, Eigen::Vector2d::Zero()),
                                   linear_field(m1, Eigen::Vector2d::Zero())};
  Eigen::VectorXd mark(2);
  mark << 0.8, -0.6;
  const Eigen::Vector2d z2(1.0, 2.0);
  JumpFill fl = marcus_jump(builtin_manifold("euclidean", 2), lin, mark, ChartPoint{z2}, 64);
  const Eigen::Matrix2d gen = mark[0] * m0 + mark[1] * m1;
  const double expm_err = (fl.curve.end_point() - Eigen::Vector2d(gen.exp() * z2))
                              .cwiseAbs()
                              .maxCoeff();

  const bool pass =
      sol.path.fills.size() == 2 && spans && valid && fill_err <= 1e-12 &&
      zero_err == 0.0 && expm_err <= 1e-8;
  report(4, "jump fills, zero marks, linear Marcus vs matrix exponential", pass,
         "fill endpoints " + num(fill_err) + ", zero-mark shift " + num(zero_err) +
             ", expm diff " + num(expm_err) + " <= 1e-8");
}

// ----------------------------------------------------- criteria 5 and 6 (lift)

double lift_discrepancy_for(const EquationSpec& eq, const DriverPath& driver,
                            const SolverConfig& cfg, const FramePoint& p0) {
  SolutionPath lifted = solve_lifted_ddej(eq, p0, driver, cfg);
  LiftedPath lp = lift_path(eq.manifold, lifted.path, p0);
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.times.size(); ++j)
    worst =
        std::max(worst, (lp.nodes[j].frame - lifted.frames[j]).cwiseAbs().maxCoeff());
  return worst;
}

void criterion5() {
  EquationSpec eq;
  eq.manifold = builtin_manifold("sphere2");
  eq.fields = {constant_field(Eigen::Vector2d(0.06, 0.3))};
  eq.delay = 0.5;
  eq.initial_curve = constant_segment(Eigen::Vector2d(1.1, 0.0), -0.5, 0.0);
  JumpSchedule s;
  s.times = {0.8, 1.7, 2.4};
  Eigen::VectorXd mk(1);
  mk << 1.0;
  s.marks = {mk, mk, mk};
  FramePoint p0{ChartPoint{eq.initial_curve.start_point()}, Eigen::Matrix2d::Identity()};

  SolverConfig fine;
  fine.step = 1e-3;
  fine.horizon = 3.0;
  const double d_fine =
      lift_discrepancy_for(eq, deterministic_integrator(s, 3.0, 1e-3), fine, p0);
  SolverConfig coarse = fine;
  coarse.step = 2e-3;
  const double d_coarse =
      lift_discrepancy_for(eq, deterministic_integrator(s, 3.0, 2e-3), coarse, p0);

  const double ratio = d_coarse / d_fine;
  const bool pass = d_fine <= 1e-4 && ratio >= 1.5;
  report(5, "deterministic lifted solve matches the transported base path", pass,
         "discrepancy " + num(d_fine) + " <= 1e-4 at h = 1e-3, coarse/fine ratio " +
             num(ratio) + " >= 1.5");
}

void criterion6() {
  EquationSpec eq;
  eq.manifold = builtin_manifold("sphere2");
  eq.fields = {constant_field(Eigen::Vector2d(0.05, 0.2)),
               constant_field(Eigen::Vector2d(0.08, 0.04))};
  eq.delay = 0.5;
  eq.initial_curve = constant_segment(Eigen::Vector2d(1.1, 0.0), -0.5, 0.0);
  JumpSchedule s;
  s.times = {0.4};
  Eigen::Vector2d mk(1.0, 0.2);
  s.marks = {mk};
  FramePoint p0{ChartPoint{eq.initial_curve.start_point()}, Eigen::Matrix2d::Identity()};

  std::vector<double> coarse_disc, fine_disc;
  for (int path = 0; path < 20; ++path) {
    DriverPath driver = sample_brownian(derive_seed(6006, path), 1e-3, 1.0, 1);
    driver.schedule = snap_schedule(s, 1e-3, 1.0);
    SolverConfig cfg;
    cfg.step = 1e-3;
    cfg.horizon = 1.0;
    coarse_disc.push_back(lift_discrepancy_for(eq, driver, cfg, p0));

    DriverPath refined = refine_half(driver, derive_seed(6006, 100 + path));
    cfg.step = 5e-4;
    fine_disc.push_back(lift_discrepancy_for(eq, refined, cfg, p0));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  const double med = median(coarse_disc);
  const double med_fine = median(fine_disc);
  const bool pass = med <= 1e-3 && med_fine < med;
  report(6, "stochastic lifted solve matches the transported base path", pass,
         "median discrepancy " + num(med) + " <= 1e-3 over 20 paths, refined median " +
             num(med_fine) + " < " + num(med));
}

// ---------------------------------------------------------------- criterion 7

void criterion7() {
  const ManifoldSpec m = builtin_manifold("sphere2");
  std::mt19937_64 rng(7007);
  std::uniform_real_distribution<double> theta(0.6, M_PI - 0.6);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> coeff(0.2, 0.6);

  double lo = 1.0, hi = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    FramePoint p;
    p.base = ChartPoint{Eigen::Vector2d(theta(rng), unit(rng))};
    Eigen::Matrix2d f;
    do {
      f << unit(rng), unit(rng), unit(rng), unit(rng);
    } while (std::abs(f.determinant()) < 0.2);
    p.frame = f;
    VectorFieldSpec x_field =
        constant_field(Eigen::Vector2d(coeff(rng), coeff(rng)));
    Eigen::Matrix2d a;
    a << coeff(rng), -coeff(rng), coeff(rng), coeff(rng);
    VectorFieldSpec y_field = linear_field(a, Eigen::Vector2d(coeff(rng), 0.1));

    const double r1 = check_nablaH_horizontal(m, x_field, y_field, p, 1e-3);
    const double r2 = check_nablaH_horizontal(m, x_field, y_field, p, 5e-4);
    const double ratio = r2 / r1;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const bool pass = lo >= 0.4 && hi <= 0.6;
  report(7, "nabla^H commutation residual is O(eps)", pass,
         "halving ratios in [" + num(lo) + ", " + num(hi) + "] within [0.4, 0.6]");
}

// ---------------------------------------------------------------- criterion 8

void criterion8() {
  const int n = 10000;
  // Brownian endpoint variance at T = 1 per component.
  Eigen::Vector2d sum = Eigen::Vector2d::Zero(), sum2 = Eigen::Vector2d::Zero();
  for (int i = 0; i < n; ++i) {
    DriverPath d = sample_brownian(derive_seed(8008, i), 0.1, 1.0, 2);
    Eigen::Vector2d b = d.continuous_part(1.0).tail(2);
    sum += b;
    sum2 += b.cwiseAbs2();
  }
  Eigen::Vector2d var = sum2 / n - (sum / n).cwiseAbs2();
  const double var_err = (var - Eigen::Vector2d::Ones()).cwiseAbs().maxCoeff();

  // Poisson jump count, rate 3 on (0, 1].
  MarkLaw law = GaussianMark{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
  double count = 0.0;
  for (int i = 0; i < n; ++i)
    count += static_cast<double>(
        sample_poisson_schedule(derive_seed(8888, i), 3.0, 1.0, law, 0).times.size());
  const double mean = count / n;
  const double sigma = std::sqrt(3.0 / n);
  const double mean_dev = std::abs(mean - 3.0);

  // Pathwise decomposition L_t = B_t + jump sums, checked exactly.
  bool exact = true;
  for (int i = 0; i < 100; ++i) {
    DriverPath d = sample_brownian(derive_seed(8080, i), 0.05, 1.0, 1);
    JumpSchedule raw = sample_poisson_schedule(derive_seed(8081, i), 2.0, 1.0,
                                               GaussianMark{Eigen::VectorXd::Zero(2),
                                                            Eigen::MatrixXd::Identity(2, 2)},
                                               1);
    d.schedule = snap_schedule(raw, 0.05, 1.0);
    for (double t : {0.1, 0.33, 0.5, 0.9, 1.0}) {
      Eigen::VectorXd expected = d.continuous_part(t);
      for (std::size_t k = 0; k < d.schedule.times.size(); ++k)
        if (d.schedule.times[k] <= t) expected += d.schedule.marks[k];
      if ((d.value(t) - expected).cwiseAbs().maxCoeff() != 0.0) exact = false;
    }
  }

  const bool pass = var_err <= 0.05 && mean_dev <= 3.0 * sigma && exact;
  report(8, "driver laws over 10^4 seeds", pass,
         "brownian var dev " + num(var_err) + " <= 0.05, poisson mean dev " +
             num(mean_dev) + " <= " + num(3.0 * sigma) +
             (exact ? ", decomposition exact" : ", decomposition INEXACT"));
}

// ---------------------------------------------------------------- criterion 9

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion9() {
  const std::string sim_cfg = R"({
    "mode": "simulate", "seed": 99,
    "manifold": {"name": "sphere2"},
    "fields": [{"type": "constant", "components": [0.05, 0.2]},
               {"type": "constant", "components": [0.1, 0.0]}],
    "driver": {"brownian_components": 1,
               "jumps": {"type": "poisson", "rate": 2.0,
                         "mark": {"type": "gaussian", "mean": [0.5, 0.0],
                                  "cov_diag": [0.04, 0.04]}}},
    "delay": 0.5, "step": 0.01, "horizon": 1.0,
    "initial": {"type": "constant", "point": [1.1, 0.0]},
    "output": {"frames": true}
  })";
  const std::string ens_cfg = R"({
    "mode": "ensemble", "seed": 99, "threads": 4, "ensemble": 12,
    "manifold": {"name": "euclidean", "dim": 2},
    "fields": [{"type": "linear", "matrix": [[0.0, -0.4], [0.4, 0.0]]},
               {"type": "constant", "components": [0.2, 0.1]}],
    "driver": {"brownian_components": 1},
    "delay": 0.25, "step": 0.01, "horizon": 1.0,
    "initial": {"type": "constant", "point": [1.0, 0.0]}
  })";

  auto base = std::filesystem::temp_directory_path() / "ddej_acceptance";
  std::filesystem::remove_all(base);
  bool identical = true;
  for (const auto& [tag, cfg] : {std::pair{std::string("sim"), sim_cfg},
                                 std::pair{std::string("ens"), ens_cfg}}) {
    const auto d1 = base / (tag + "_1"), d2 = base / (tag + "_2");
    run_config_text(cfg, d1.string());
    run_config_text(cfg, d2.string());
    for (const auto& entry : std::filesystem::directory_iterator(d1)) {
      if (entry.path().extension() != ".csv") continue;
      if (slurp(entry.path()) != slurp(d2 / entry.path().filename())) identical = false;
    }
  }
  report(9, "byte-identical CSV output across reruns", identical,
         identical ? "simulate and threaded ensemble outputs match" : "outputs differ");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (g_failures > 0) std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
