#pragma once

#include <Eigen/Core>

namespace hypflow {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

// Per-edge hyperbolic lengths l0, indexed like IdealTriangulation::edges.
using BaseMetric = VectorXd;
// One log-factor w_i per boundary component.
using ConformalFactor = VectorXd;
// Geodesic boundary lengths B_i.
using BoundaryLengths = VectorXd;

}  // namespace hypflow
