#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fields.hpp"
#include "frame_bundle.hpp"

using namespace ddej;

namespace {

FramePoint random_sphere_frame(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> theta(0.5, M_PI - 0.5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  FramePoint p;
  p.base = ChartPoint{Eigen::Vector2d(theta(rng), unit(rng))};
  do {
    p.frame = Eigen::Matrix2d::NullaryExpr([&](Eigen::Index, Eigen::Index) { return unit(rng); });
  } while (std::abs(p.frame.determinant()) < 0.1);
  return p;
}

EquationSpec sphere_equation() {
  EquationSpec eq;
  eq.manifold = builtin_manifold("sphere2");
  eq.fields = {constant_field(Eigen::Vector2d(0.08, 0.35))};
  eq.delay = 0.5;
  eq.initial_curve = constant_segment(Eigen::Vector2d(1.1, 0.2), -0.5, 0.0);
  return eq;
}

double lift_vs_transport(const EquationSpec& eq, const DriverPath& driver,
                         const SolverConfig& cfg, const FramePoint& p0) {
  SolutionPath lifted = solve_lifted_ddej(eq, p0, driver, cfg);
  LiftedPath lp = lift_path(eq.manifold, lifted.path, p0);
  REQUIRE(lp.times.size() == lifted.grid.size());
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.times.size(); ++j) {
    REQUIRE(std::abs(lp.times[j] - lifted.grid[j]) < 1e-9);
    worst =
        std::max(worst, (lp.nodes[j].frame - lifted.frames[j]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("horizontal lift of a tangent vector") {
  const ManifoldSpec m = builtin_manifold("sphere2");
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    FramePoint p = random_sphere_frame(rng);
    Tangent v{p.base, Eigen::Vector2d(0.7, -0.4)};
    BundleTangent w = horizontal_lift_vector(m, p, v);
    CHECK(w.base_component == v.components);
    CHECK(horizontality_residual(m, p, w) < 1e-14);
  }

  // In a flat chart horizontal means constant frame entries.
  const ManifoldSpec flat = builtin_manifold("euclidean", 2);
  FramePoint p{ChartPoint{Eigen::Vector2d(1.0, 2.0)}, Eigen::Matrix2d::Identity()};
  BundleTangent w =
      horizontal_lift_vector(flat, p, Tangent{p.base, Eigen::Vector2d(1.0, 1.0)});
  CHECK(w.frame_component.cwiseAbs().maxCoeff() == 0.0);

  Tangent detached{ChartPoint{Eigen::Vector2d(0.1, 0.1)}, Eigen::Vector2d(1.0, 0.0)};
  CHECK_THROWS_AS(horizontal_lift_vector(flat, p, detached), ContractError);
}

TEST_CASE("horizontal lift is equivariant under the frame action") {
  const ManifoldSpec m = builtin_manifold("sphere2");
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    FramePoint p = random_sphere_frame(rng);
    Eigen::Matrix2d g;
    do {
      g = Eigen::Matrix2d::NullaryExpr([&](Eigen::Index, Eigen::Index) { return unit(rng); });
    } while (std::abs(g.determinant()) < 0.1);
    Tangent v{p.base, Eigen::Vector2d(unit(rng), unit(rng))};
    BundleTangent w = horizontal_lift_vector(m, p, v);
    FramePoint pg{p.base, p.frame * g};
    BundleTangent wg = horizontal_lift_vector(m, pg, v);
    CHECK((wg.frame_component - w.frame_component * g).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("vertical fields") {
  FramePoint p{ChartPoint{Eigen::Vector2d(1.0, 0.0)}, Eigen::Matrix2d::Identity() * 2.0};
  VerticalGenerator id{Eigen::Matrix2d::Identity()};
  BundleTangent w = vertical_field(p, id);
  CHECK(w.base_component.cwiseAbs().maxCoeff() == 0.0);
  CHECK((w.frame_component - p.frame).cwiseAbs().maxCoeff() == 0.0);

  VerticalGenerator zero{Eigen::Matrix2d::Zero()};
  CHECK(vertical_field(p, zero).frame_component.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lifted solver agrees with the transported base path") {
  EquationSpec eq = sphere_equation();
  JumpSchedule s;
  s.times = {0.8, 1.6};
  Eigen::VectorXd mk(1);
  mk << 1.0;
  s.marks = {mk, mk};
  FramePoint p0{ChartPoint{eq.initial_curve.start_point()}, Eigen::Matrix2d::Identity()};

  SolverConfig coarse;
  coarse.step = 0.01;
  coarse.horizon = 2.0;
  const double d_coarse =
      lift_vs_transport(eq, deterministic_integrator(s, 2.0, 0.01), coarse, p0);
  CHECK(d_coarse < 1e-6);

  SolverConfig fine = coarse;
  fine.step = 0.005;
  const double d_fine =
      lift_vs_transport(eq, deterministic_integrator(s, 2.0, 0.005), fine, p0);
  CHECK(d_fine < d_coarse);
}

TEST_CASE("lifted solver handles non-identity initial frames") {
  EquationSpec eq = sphere_equation();
  Eigen::Matrix2d f0;
  f0 << 1.0, 0.3, -0.2, 0.8;
  FramePoint p0{ChartPoint{eq.initial_curve.start_point()}, f0};
  SolverConfig cfg;
  cfg.step = 0.01;
  cfg.horizon = 1.0;
  CHECK(lift_vs_transport(eq, deterministic_integrator({}, 1.0, 0.01), cfg, p0) < 1e-6);

  FramePoint detached{ChartPoint{Eigen::Vector2d(0.4, 0.4)}, f0};
  CHECK_THROWS_AS(
      solve_lifted_ddej(eq, detached, deterministic_integrator({}, 1.0, 0.01), cfg),
      ContractError);
}

TEST_CASE("nabla^H transport of horizontal vectors") {
  EquationSpec eq = sphere_equation();
  JumpSchedule s;
  s.times = {0.75};
  Eigen::VectorXd mk(1);
  mk << 2.0;
  s.marks = {mk};
  SolverConfig cfg;
  cfg.step = 0.005;
  cfg.horizon = 1.5;
  FramePoint p0{ChartPoint{eq.initial_curve.start_point()}, Eigen::Matrix2d::Identity()};
  SolutionPath sol = solve_lifted_ddej(eq, p0, deterministic_integrator(s, 1.5, 0.005), cfg);
  LiftedPath lp = lift_path(eq.manifold, sol.path, p0);

  const FramePoint& start = lp.nodes[lp.node_index(0.0)];
  BundleTangent w = horizontal_lift_vector(eq.manifold, start,
                                           Tangent{start.base, Eigen::Vector2d(0.5, -0.2)});
  BundleTangent moved = transport_horizontal(eq.manifold, lp, sol.path, 0.0, 1.25, w);
  const FramePoint& end = lp.nodes[lp.node_index(1.25)];
  CHECK(horizontality_residual(eq.manifold, end, moved) < 1e-12);

  // Backward transport inverts the forward one.
  BundleTangent back = transport_horizontal(eq.manifold, lp, sol.path, 1.25, 0.0, moved);
  CHECK((back.base_component - w.base_component).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((back.frame_component - w.frame_component).cwiseAbs().maxCoeff() < 1e-9);

  // Vertical input is rejected.
  BundleTangent vert = vertical_field(start, VerticalGenerator{Eigen::Matrix2d::Identity()});
  CHECK_THROWS_AS(transport_horizontal(eq.manifold, lp, sol.path, 0.0, 1.25, vert),
                  ContractError);
}

TEST_CASE("nabla^H finite-difference residual shrinks linearly") {
  const ManifoldSpec m = builtin_manifold("sphere2");
  VectorFieldSpec x_field = constant_field(Eigen::Vector2d(0.4, 0.7));
  Eigen::Matrix2d a;
  a << 0.1, -0.3, 0.2, 0.0;
  VectorFieldSpec y_field = linear_field(a, Eigen::Vector2d(0.3, 0.1));
  std::mt19937_64 rng(23);
  FramePoint p = random_sphere_frame(rng);
  const double r1 = check_nablaH_horizontal(m, x_field, y_field, p, 1e-3);
  const double r2 = check_nablaH_horizontal(m, x_field, y_field, p, 5e-4);
  CHECK(r1 < 1e-2);
  CHECK(r2 < r1);
  CHECK(r2 / r1 > 0.3);
  CHECK(r2 / r1 < 0.7);
}
