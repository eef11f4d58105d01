#pragma once

#include <Eigen/Dense>

namespace rpid {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Eigen::Matrix<double, Eigen::Dynamic, 1>;
using MatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

using VecRef = Eigen::Ref<const VectorXd>;
using MatRef = Eigen::Ref<const MatrixXd>;

}  // namespace rpid
