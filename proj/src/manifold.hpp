#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ddej {

// A point in the fixed coordinate chart of a manifold.
struct ChartPoint {
  Eigen::VectorXd coords;

  int dim() const { return static_cast<int>(coords.size()); }
};

// A tangent vector in chart coordinates, anchored at its base point.
struct Tangent {
  ChartPoint base;
  Eigen::VectorXd components;
};

// Christoffel symbols at a point: gamma[a](b, c) = Gamma^a_{bc}.
using Christoffels = std::vector<Eigen::MatrixXd>;

struct ConnectionSpec {
  std::function<Christoffels(const ChartPoint&)> christoffel;
  bool symmetric = true;  // torsion-free indicator
};

struct VectorFieldSpec {
  std::function<Tangent(const ChartPoint&)> eval;
  std::string label;
};

// Chart-based manifold with a connection. One chart per manifold; trajectories
// leaving the chart raise a DomainError instead of switching charts.
struct ManifoldSpec {
  int dim = 0;
  ConnectionSpec connection;
  std::function<bool(const ChartPoint&)> domain_check;
  // Optional Riemannian metric, used by isometry tests only. For builtins with
  // a metric the connection is its Levi-Civita connection.
  std::optional<std::function<Eigen::MatrixXd(const ChartPoint&)>> metric;
  std::string name;
  // Flat chart (Gamma identically zero): lets transport short-circuit to the
  // exact identity.
  bool flat = false;
};

// Catalog of built-in test manifolds: euclidean(n), sphere2, halfplane, circle.
// Throws ConfigError for unknown names.
ManifoldSpec builtin_manifold(const std::string& name, int dim = 0);

bool validate_point(const ManifoldSpec& m, const ChartPoint& x);

// Validating field evaluation (checks the chart domain, asserts base = x).
Tangent eval_field(const ManifoldSpec& m, const VectorFieldSpec& f, const ChartPoint& x);

// Contraction A(a, c) = sum_b Gamma^a_{bc} v^b; the transport ODE reads
// dE/dt = -A(gamma(t), gamma'(t)) E.
Eigen::MatrixXd christoffel_contract(const Christoffels& gamma, const Eigen::VectorXd& v);

}  // namespace ddej
