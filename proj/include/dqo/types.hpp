#pragma once

#include <Eigen/Dense>

namespace dqo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Matrix2 = Eigen::Matrix2d;
using Vector2 = Eigen::Vector2d;

/// Additive floor used by every relative tolerance so that zero inputs compare sanely.
inline constexpr double kToleranceFloor = 1e-12;

}  // namespace dqo
