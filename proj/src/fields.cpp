#include "fields.hpp"

namespace ddej {

VectorFieldSpec zero_field(int dim) {
  VectorFieldSpec f;
  f.label = "zero";
  f.eval = [dim](const ChartPoint& x) {
    return Tangent{x, Eigen::VectorXd::Zero(dim)};
  };
  return f;
}

VectorFieldSpec constant_field(Eigen::VectorXd components, std::string label) {
  VectorFieldSpec f;
  f.label = std::move(label);
  f.eval = [c = std::move(components)](const ChartPoint& x) { return Tangent{x, c}; };
  return f;
}

VectorFieldSpec linear_field(Eigen::MatrixXd matrix, Eigen::VectorXd offset,
                             std::string label) {
  VectorFieldSpec f;
  f.label = std::move(label);
  f.eval = [m = std::move(matrix), b = std::move(offset)](const ChartPoint& x) {
    return Tangent{x, Eigen::VectorXd(m * x.coords + b)};
  };
  return f;
}

VectorFieldSpec rotation_field(double scale, std::string label) {
  VectorFieldSpec f;
  f.label = std::move(label);
  f.eval = [scale](const ChartPoint& x) {
    if (x.dim() != 2) throw ContractError("rotation field requires a 2-d chart");
    Eigen::VectorXd v(2);
    v << -scale * x.coords[1], scale * x.coords[0];
    return Tangent{x, v};
  };
  return f;
}

}  // namespace ddej
