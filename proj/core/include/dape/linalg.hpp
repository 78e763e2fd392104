#pragma once

#include <Eigen/Core>

namespace dape {

// Row-major dense matrix used for activations, latents and parameters.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

}  // namespace dape
