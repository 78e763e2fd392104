#include "dape/model/loss.hpp"

#include <cmath>

#include "dape/error.hpp"

namespace dape::model {

LossGrad cross_entropy(const Mat& logits, std::span<const int> labels, std::span<const double> weights) {
  const Eigen::Index n = logits.rows();
  const Eigen::Index k = logits.cols();
  if (static_cast<std::size_t>(n) != labels.size()) throw ConfigError("cross_entropy: label count mismatch");
  if (!weights.empty() && weights.size() != labels.size()) throw ConfigError("cross_entropy: weight count mismatch");
  if (n == 0) throw ConfigError("cross_entropy: empty batch");
  if (!logits.allFinite()) throw DivergenceError("cross_entropy: non-finite logits");
  LossGrad out;
  out.grad.resize(n, k);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= k) throw ConfigError("cross_entropy: label out of range");
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    const double mx = logits.row(i).maxCoeff();
    double denom = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) denom += std::exp(logits(i, j) - mx);
    const double log_denom = std::log(denom);
    out.loss += w * (log_denom - (logits(i, y) - mx)) * inv_n;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double p = std::exp(logits(i, j) - mx - log_denom);
      out.grad(i, j) = w * inv_n * (p - (j == y ? 1.0 : 0.0));
    }
  }
  return out;
}

std::vector<int> argmax_rows(const Mat& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index j;
    logits.row(i).maxCoeff(&j);
    out[static_cast<std::size_t>(i)] = static_cast<int>(j);
  }
  return out;
}

}  // namespace dape::model
