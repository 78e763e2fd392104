#include "dape/eval/linear_svm.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "dape/error.hpp"

namespace dape::eval {
namespace {

Mat augment(const Mat& x) {
  Mat a(x.rows(), x.cols() + 1);
  a.leftCols(x.cols()) = x;
  a.col(x.cols()).setOnes();
  return a;
}

double objective(const Mat& xa, const Vec& y, const Vec& w, double c) {
  const Vec margin = (y.array() * (xa * w).array()).matrix();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < margin.size(); ++i) {
    const double h = 1.0 - margin[i];
    if (h > 0.0) loss += h * h;
  }
  return 0.5 * w.squaredNorm() + c * loss;
}

}  // namespace

void SvmConfig::validate() const {
  if (!(c > 0.0)) throw ConfigError("svm: C must be positive");
  if (!(tol > 0.0)) throw ConfigError("svm: tolerance must be positive");
  if (max_iter < 1) throw ConfigError("svm: max_iter must be >= 1");
}

Vec train_squared_hinge(const Mat& x, std::span<const int> y_pm, const SvmConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(x.rows()) != y_pm.size()) throw DataError("svm: label count mismatch");
  const Mat xa = augment(x);
  const Eigen::Index n = xa.rows();
  const Eigen::Index d = xa.cols();
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = y_pm[static_cast<std::size_t>(i)] > 0 ? 1.0 : -1.0;

  Vec w = Vec::Zero(d);
  double g0 = -1.0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Vec margin = (y.array() * (xa * w).array()).matrix();
    // Active set: samples inside the margin.
    Vec coef = Vec::Zero(n);
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (margin[i] < 1.0) {
        coef[i] = margin[i] - 1.0;
        active.push_back(i);
      }
    }
    const Vec grad = w + 2.0 * cfg.c * xa.transpose() * (coef.array() * y.array()).matrix();
    const double gnorm = grad.norm();
    if (g0 < 0.0) g0 = gnorm;
    if (gnorm <= cfg.tol * std::max(g0, 1e-300)) break;

    Mat h = Mat::Identity(d, d);
    if (!active.empty()) {
      Mat xi(static_cast<Eigen::Index>(active.size()), d);
      for (std::size_t r = 0; r < active.size(); ++r) xi.row(static_cast<Eigen::Index>(r)) = xa.row(active[r]);
      h.noalias() += 2.0 * cfg.c * xi.transpose() * xi;
    }
    const Vec step = -h.ldlt().solve(grad);

    const double f = objective(xa, y, w, cfg.c);
    const double slope = grad.dot(step);
    double t = 1.0;
    Vec next = w + step;
    while (objective(xa, y, next, cfg.c) > f + 0.01 * t * slope && t > 1e-12) {
      t *= 0.5;
      next = w + t * step;
    }
    w = next;
  }
  return w;
}

void LinearSvm::fit(const Mat& x, std::span<const int> labels, int num_classes, const SvmConfig& cfg) {
  if (num_classes < 2) throw DataError("svm: need at least two classes");
  for (int l : labels)
    if (l < 0 || l >= num_classes) throw DataError("svm: label out of range");
  w_.resize(num_classes, x.cols() + 1);
  std::vector<int> y(labels.size());
  for (int k = 0; k < num_classes; ++k) {
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == k ? 1 : -1;
    w_.row(k) = train_squared_hinge(x, y, cfg).transpose();
  }
}

Mat LinearSvm::decision_function(const Mat& x) const {
  const Eigen::Index d = w_.cols() - 1;
  if (x.cols() != d) throw DataError("svm: feature dimension mismatch");
  Mat out = x * w_.leftCols(d).transpose();
  out.rowwise() += w_.col(d).transpose();
  return out;
}

std::vector<int> LinearSvm::predict(const Mat& x) const {
  const Mat scores = decision_function(x);
  std::vector<int> pred(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < scores.cols(); ++k)
      if (scores(i, k) > scores(i, best)) best = k;
    pred[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return pred;
}

Standardizer Standardizer::fit(const Mat& x) {
  if (x.rows() == 0) throw DataError("standardizer: empty input");
  Standardizer s;
  s.mean = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean[j]).square().mean();
    s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Mat Standardizer::apply(const Mat& x) const {
  Mat out = x;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

}  // namespace dape::eval
