#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dape/linalg.hpp"
#include "dape/model/network.hpp"
#include "dape/random.hpp"

namespace dape::testing {

inline Mat random_mat(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

// Direct double sum over every sample pair; independent of the library's
// matrix formulation.
inline double brute_force_mmd2(const Mat& p, const Mat& q, double sigma) {
  auto k = [&](const auto& a, const auto& b) { return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma)); };
  const double b = static_cast<double>(p.rows());
  double pp = 0.0, qq = 0.0, pq = 0.0;
  for (Eigen::Index m = 0; m < p.rows(); ++m) {
    for (Eigen::Index n = 0; n < p.rows(); ++n) {
      if (m != n) {
        pp += k(p.row(m), p.row(n));
        qq += k(q.row(m), q.row(n));
      }
      pq += k(p.row(m), q.row(n));
    }
  }
  return pp / (b * (b - 1.0)) + qq / (b * (b - 1.0)) - 2.0 * pq / (b * b);
}

// Central finite difference of f with respect to every entry of x.
inline Mat numeric_gradient(Mat& x, const std::function<double()>& f, double h = 1e-6) {
  Mat g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double up = f();
    x.data()[i] = saved - h;
    const double down = f();
    x.data()[i] = saved;
    g.data()[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// max |a - n| / max(1e-6, |a|_inf, |n|_inf): the relative error measure used
// by every gradient check in the suite.
inline double relative_error(const Mat& analytic, const Mat& numeric) {
  const double scale = std::max({1e-6, analytic.cwiseAbs().maxCoeff(), numeric.cwiseAbs().maxCoeff()});
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

// The small two-source model used for gradient checks: B = 4, C = 3,
// L = 32, n_z = 6.
inline model::NetworkConfig tiny_network_config(model::Variant variant) {
  model::NetworkConfig cfg;
  cfg.variant = variant;
  cfg.encoder.n_z = 6;
  cfg.encoder.filters = {3, 4, 5, 6};
  cfg.encoder.kernel_length = 3;
  cfg.encoder.pool_length = 2;
  cfg.encoder.pool_stride = 2;
  cfg.sources = {{3, 32}, {3, 32}};
  cfg.seed = 11;
  cfg.domain_hidden = {5};
  return cfg;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dape_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dape::testing
