#include "dape/mmd/mmd.hpp"

#include <cmath>
#include <string>

#include "dape/error.hpp"

namespace dape::mmd {

void Bandwidths::validate() const {
  if (sigma.empty()) throw ConfigError("bandwidths must be non-empty");
  for (const double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("bandwidths must be positive and finite");
  }
}

double gaussian_kernel(std::span<const double> u, std::span<const double> v, double sigma) {
  if (u.size() != v.size()) throw ConfigError("gaussian_kernel: dimension mismatch");
  if (!(sigma > 0.0)) throw ConfigError("gaussian_kernel: sigma must be positive");
  double d2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    d2 += d * d;
  }
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

namespace {

void check_batches(const Mat& zp, const Mat& zq) {
  if (zp.rows() != zq.rows() || zp.cols() != zq.cols()) throw ConfigError("mmd2: batch shape mismatch");
  if (zp.rows() < 2) throw ConfigError("mmd2: batch size must be at least 2");
}

// Pairwise squared Euclidean distances between the rows of a and b.
Mat squared_distances(const Mat& a, const Mat& b) {
  Mat d(a.rows(), b.rows());
  const Eigen::Index dim = a.cols();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i).data();
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const double* bj = b.row(j).data();
      double s = 0.0;
      for (Eigen::Index k = 0; k < dim; ++k) {
        const double diff = ai[k] - bj[k];
        s += diff * diff;
      }
      d(i, j) = s;
    }
  }
  return d;
}

struct PairDistances {
  Mat pp, qq, pq;
};

PairDistances distances(const Mat& zp, const Mat& zq) {
  return {squared_distances(zp, zp), squared_distances(zq, zq), squared_distances(zp, zq)};
}

Mat kernel_matrix(const Mat& d2, double sigma) {
  const double inv = -1.0 / (2.0 * sigma * sigma);
  return (d2.array() * inv).exp().matrix();
}

double off_diagonal_sum(const Mat& k) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      if (i != j) s += k(i, j);
    }
  }
  return s;
}

double full_sum(const Mat& k) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) s += k(i, j);
  }
  return s;
}

double mmd2_from_kernels(const Mat& kpp, const Mat& kqq, const Mat& kpq) {
  const double b = static_cast<double>(kpp.rows());
  const double within = 1.0 / (b * (b - 1.0));
  return within * off_diagonal_sum(kpp) + within * off_diagonal_sum(kqq) - 2.0 / (b * b) * full_sum(kpq);
}

// Adds scale * gradient of the three estimator terms for one bandwidth.
void accumulate_grad(const Mat& zp, const Mat& zq, const Mat& kpp, const Mat& kqq, const Mat& kpq, double sigma,
                     double scale, Mat& gp, Mat& gq) {
  const double b = static_cast<double>(zp.rows());
  const double s2 = sigma * sigma;
  // d k(u,v) / du = -k(u,v) (u - v) / sigma^2. The diagonal of each
  // within-batch kernel contributes (u - u) = 0, so full matrices are used.
  const double cw = -2.0 / (b * (b - 1.0) * s2) * scale;
  const double cx = 2.0 / (b * b * s2) * scale;
  const Vec rpp = kpp.rowwise().sum();
  const Vec rqq = kqq.rowwise().sum();
  const Vec rpq = kpq.rowwise().sum();
  const Vec cpq = kpq.colwise().sum().transpose();
  gp.noalias() += cw * (rpp.asDiagonal() * zp - kpp * zp);
  gq.noalias() += cw * (rqq.asDiagonal() * zq - kqq * zq);
  gp.noalias() += cx * (rpq.asDiagonal() * zp - kpq * zq);
  gq.noalias() += cx * (cpq.asDiagonal() * zq - kpq.transpose() * zp);
}

}  // namespace

double mmd2_unbiased(const Mat& zp, const Mat& zq, double sigma) {
  check_batches(zp, zq);
  if (!(sigma > 0.0)) throw ConfigError("mmd2: sigma must be positive");
  const PairDistances d = distances(zp, zq);
  return mmd2_from_kernels(kernel_matrix(d.pp, sigma), kernel_matrix(d.qq, sigma), kernel_matrix(d.pq, sigma));
}

double mmd2_unbiased_grad(const Mat& zp, const Mat& zq, double sigma, double scale, Mat& grad_p, Mat& grad_q) {
  check_batches(zp, zq);
  if (!(sigma > 0.0)) throw ConfigError("mmd2: sigma must be positive");
  const PairDistances d = distances(zp, zq);
  const Mat kpp = kernel_matrix(d.pp, sigma);
  const Mat kqq = kernel_matrix(d.qq, sigma);
  const Mat kpq = kernel_matrix(d.pq, sigma);
  accumulate_grad(zp, zq, kpp, kqq, kpq, sigma, scale, grad_p, grad_q);
  return mmd2_from_kernels(kpp, kqq, kpq);
}

PairSample sample_pairs(int num_sources, Rng& rng) {
  if (num_sources < 2) throw ConfigError("sample_pairs: need at least two sources");
  std::vector<std::pair<int, int>> all;
  for (int p = 0; p < num_sources; ++p) {
    for (int q = p + 1; q < num_sources; ++q) all.emplace_back(p, q);
  }
  PairSample out;
  out.pairs.reserve(static_cast<std::size_t>(num_sources));
  for (int i = 0; i < num_sources; ++i) out.pairs.push_back(all[rng.uniform_index(all.size())]);
  return out;
}

namespace {

void check_latents(std::span<const Mat> latents, const PairSample& pairs) {
  for (const auto& z : latents) {
    if (z.rows() != latents[0].rows() || z.cols() != latents[0].cols()) {
      throw ConfigError("alignment_loss: inconsistent latent batch shapes");
    }
  }
  const int m = static_cast<int>(latents.size());
  for (const auto& [p, q] : pairs.pairs) {
    if (p == q || p < 0 || q < 0 || p >= m || q >= m) throw ConfigError("alignment_loss: invalid source pair");
  }
}

}  // namespace

double alignment_loss(std::span<const Mat> latents, const Bandwidths& bandwidths, const PairSample& pairs) {
  if (latents.size() < 2) return 0.0;
  bandwidths.validate();
  check_latents(latents, pairs);
  double total = 0.0;
  for (const auto& [p, q] : pairs.pairs) {
    const PairDistances d = distances(latents[static_cast<std::size_t>(p)], latents[static_cast<std::size_t>(q)]);
    for (const double sigma : bandwidths.sigma) {
      total += mmd2_from_kernels(kernel_matrix(d.pp, sigma), kernel_matrix(d.qq, sigma), kernel_matrix(d.pq, sigma));
    }
  }
  return total;
}

AlignmentGrad alignment_loss_grad(std::span<const Mat> latents, const Bandwidths& bandwidths,
                                  const PairSample& pairs) {
  AlignmentGrad out;
  for (const auto& z : latents) out.grads.push_back(Mat::Zero(z.rows(), z.cols()));
  if (latents.size() < 2) return out;
  bandwidths.validate();
  check_latents(latents, pairs);
  for (const auto& [p, q] : pairs.pairs) {
    const Mat& zp = latents[static_cast<std::size_t>(p)];
    const Mat& zq = latents[static_cast<std::size_t>(q)];
    const PairDistances d = distances(zp, zq);
    for (const double sigma : bandwidths.sigma) {
      const Mat kpp = kernel_matrix(d.pp, sigma);
      const Mat kqq = kernel_matrix(d.qq, sigma);
      const Mat kpq = kernel_matrix(d.pq, sigma);
      accumulate_grad(zp, zq, kpp, kqq, kpq, sigma, 1.0, out.grads[static_cast<std::size_t>(p)],
                      out.grads[static_cast<std::size_t>(q)]);
      out.loss += mmd2_from_kernels(kpp, kqq, kpq);
    }
  }
  return out;
}

}  // namespace dape::mmd
