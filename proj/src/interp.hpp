#pragma once

#include <Eigen/Dense>

namespace ddej {

// Cubic Hermite interpolation on [t0, t1] from endpoint values and derivatives.
// Exact for cubics; O(h^4) interpolation error for smooth data.
inline Eigen::VectorXd hermite_value(double t0, double t1,
                                     const Eigen::VectorXd& p0, const Eigen::VectorXd& v0,
                                     const Eigen::VectorXd& p1, const Eigen::VectorXd& v1,
                                     double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * p0 + (h10 * h) * v0 + h01 * p1 + (h11 * h) * v1;
}

inline Eigen::VectorXd hermite_derivative(double t0, double t1,
                                          const Eigen::VectorXd& p0, const Eigen::VectorXd& v0,
                                          const Eigen::VectorXd& p1, const Eigen::VectorXd& v1,
                                          double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double d00 = (6.0 * s2 - 6.0 * s) / h;
  const double d10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double d01 = (-6.0 * s2 + 6.0 * s) / h;
  const double d11 = 3.0 * s2 - 2.0 * s;
  return d00 * p0 + d10 * v0 + d01 * p1 + d11 * v1;
}

// Matrix-valued variant, used for interpolating transport frames.
inline Eigen::MatrixXd hermite_value(double t0, double t1,
                                     const Eigen::MatrixXd& p0, const Eigen::MatrixXd& v0,
                                     const Eigen::MatrixXd& p1, const Eigen::MatrixXd& v1,
                                     double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * p0 + (h10 * h) * v0 + h01 * p1 + (h11 * h) * v1;
}

}  // namespace ddej
