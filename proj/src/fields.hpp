#pragma once

#include <Eigen/Dense>
#include <string>

#include "manifold.hpp"

namespace ddej {

// Small catalog of smooth vector fields in chart coordinates, addressed by
// label from the CLI config schema.

VectorFieldSpec zero_field(int dim);

VectorFieldSpec constant_field(Eigen::VectorXd components, std::string label = "constant");

// f(x) = M x + b
VectorFieldSpec linear_field(Eigen::MatrixXd matrix, Eigen::VectorXd offset,
                             std::string label = "linear");

// 2-d rotation field scale * (-x2, x1)
VectorFieldSpec rotation_field(double scale, std::string label = "rotation");

}  // namespace ddej
