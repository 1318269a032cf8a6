#include "manifold.hpp"

#include <cmath>

namespace ddej {

namespace {

Christoffels zero_christoffels(int n) {
  return Christoffels(n, Eigen::MatrixXd::Zero(n, n));
}

ManifoldSpec make_euclidean(int n) {
  if (n < 1) throw ConfigError("euclidean(n) requires n >= 1");
  ManifoldSpec m;
  m.dim = n;
  m.name = "euclidean(" + std::to_string(n) + ")";
  m.flat = true;
  m.connection.christoffel = [n](const ChartPoint&) { return zero_christoffels(n); };
  m.connection.symmetric = true;
  m.domain_check = [](const ChartPoint& x) { return x.coords.allFinite(); };
  m.metric = [n](const ChartPoint&) { return Eigen::MatrixXd::Identity(n, n); };
  return m;
}

// Round 2-sphere in spherical coordinates (theta, phi), chart 0 < theta < pi.
// Metric diag(1, sin^2 theta); Levi-Civita symbols:
//   Gamma^theta_{phi phi} = -sin(theta) cos(theta)
//   Gamma^phi_{theta phi} = Gamma^phi_{phi theta} = cot(theta)
ManifoldSpec make_sphere2() {
  ManifoldSpec m;
  m.dim = 2;
  m.name = "sphere2";
  m.connection.symmetric = true;
  m.connection.christoffel = [](const ChartPoint& x) {
    const double theta = x.coords[0];
    const double s = std::sin(theta), c = std::cos(theta);
    Christoffels g = zero_christoffels(2);
    g[0](1, 1) = -s * c;
    g[1](0, 1) = c / s;
    g[1](1, 0) = c / s;
    return g;
  };
  m.domain_check = [](const ChartPoint& x) {
    return x.coords.allFinite() && x.coords[0] > 0.0 && x.coords[0] < M_PI;
  };
  m.metric = [](const ChartPoint& x) {
    const double s = std::sin(x.coords[0]);
    Eigen::MatrixXd g(2, 2);
    g << 1.0, 0.0, 0.0, s * s;
    return g;
  };
  return m;
}

// Hyperbolic upper half-plane, coordinates (x, y), y > 0, metric (dx^2+dy^2)/y^2.
//   Gamma^x_{xy} = Gamma^x_{yx} = -1/y, Gamma^y_{xx} = 1/y, Gamma^y_{yy} = -1/y
ManifoldSpec make_halfplane() {
  ManifoldSpec m;
  m.dim = 2;
  m.name = "halfplane";
  m.connection.symmetric = true;
  m.connection.christoffel = [](const ChartPoint& p) {
    const double y = p.coords[1];
    Christoffels g = zero_christoffels(2);
    g[0](0, 1) = -1.0 / y;
    g[0](1, 0) = -1.0 / y;
    g[1](0, 0) = 1.0 / y;
    g[1](1, 1) = -1.0 / y;
    return g;
  };
  m.domain_check = [](const ChartPoint& p) {
    return p.coords.allFinite() && p.coords[1] > 0.0;
  };
  m.metric = [](const ChartPoint& p) {
    const double y2 = p.coords[1] * p.coords[1];
    Eigen::MatrixXd g(2, 2);
    g << 1.0 / y2, 0.0, 0.0, 1.0 / y2;
    return g;
  };
  return m;
}

// Circle with angle coordinate on the universal cover; flat connection.
ManifoldSpec make_circle() {
  ManifoldSpec m;
  m.dim = 1;
  m.name = "circle";
  m.flat = true;
  m.connection.symmetric = true;
  m.connection.christoffel = [](const ChartPoint&) { return zero_christoffels(1); };
  m.domain_check = [](const ChartPoint& x) { return x.coords.allFinite(); };
  m.metric = [](const ChartPoint&) { return Eigen::MatrixXd::Identity(1, 1); };
  return m;
}

}  // namespace

ManifoldSpec builtin_manifold(const std::string& name, int dim) {
  if (name == "euclidean") return make_euclidean(dim);
  if (name.rfind("euclidean(", 0) == 0 && name.back() == ')') {
    const int n = std::stoi(name.substr(10, name.size() - 11));
    return make_euclidean(n);
  }
  if (name == "sphere2") return make_sphere2();
  if (name == "halfplane") return make_halfplane();
  if (name == "circle") return make_circle();
  throw ConfigError("unknown manifold '" + name + "'");
}

bool validate_point(const ManifoldSpec& m, const ChartPoint& x) {
  if (x.dim() != m.dim)
    throw ContractError("point dimension " + std::to_string(x.dim()) +
                        " does not match manifold dimension " + std::to_string(m.dim));
  return m.domain_check(x);
}

Tangent eval_field(const ManifoldSpec& m, const VectorFieldSpec& f, const ChartPoint& x) {
  if (!validate_point(m, x))
    throw DomainError("field '" + f.label + "' evaluated outside chart domain", 0.0);
  Tangent t = f.eval(x);
  t.base = x;
  return t;
}

Eigen::MatrixXd christoffel_contract(const Christoffels& gamma, const Eigen::VectorXd& v) {
  const int n = static_cast<int>(gamma.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int idx = 0; idx < n; ++idx) {
    // row idx of A: A(idx, c) = sum_b Gamma^idx_{bc} v^b
    a.row(idx) = v.transpose() * gamma[idx];
  }
  return a;
}

}  // namespace ddej
