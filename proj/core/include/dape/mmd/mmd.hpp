#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dape/linalg.hpp"
#include "dape/random.hpp"

namespace dape::mmd {

// Gaussian kernel bandwidths; the alignment loss sums over all of them.
struct Bandwidths {
  std::vector<double> sigma = {10.0, 15.0, 20.0, 50.0};
  void validate() const;
};

// Sampled source pairs (0-based, p < q) for one training step.
struct PairSample {
  std::vector<std::pair<int, int>> pairs;
};

// exp(-||u - v||^2 / (2 sigma^2)).
double gaussian_kernel(std::span<const double> u, std::span<const double> v, double sigma);

// Unbiased estimate of squared MMD between two equally sized batches
// (rows are samples):
//   1/(B(B-1)) sum_{m!=n} k(p_m,p_n) + 1/(B(B-1)) sum_{m!=n} k(q_m,q_n)
//   - 2/B^2 sum_{m,n} k(p_m,q_n)
// The value can be negative and is not clamped.
double mmd2_unbiased(const Mat& zp, const Mat& zq, double sigma);

// Same value; adds scale * d(mmd2)/d(zp) and scale * d(mmd2)/d(zq) into the
// gradient buffers, which must already have the batch shapes.
double mmd2_unbiased_grad(const Mat& zp, const Mat& zq, double sigma, double scale, Mat& grad_p, Mat& grad_q);

// M draws, uniform over the unordered pairs {p, q}, p != q, with
// replacement. Requires M >= 2.
PairSample sample_pairs(int num_sources, Rng& rng);

// Sum over sampled pairs (outer) and bandwidths (inner) of mmd2_unbiased.
// Zero when fewer than two latents are given.
double alignment_loss(std::span<const Mat> latents, const Bandwidths& bandwidths, const PairSample& pairs);

struct AlignmentGrad {
  double loss = 0.0;
  std::vector<Mat> grads;  // d loss / d latent, one per source
};
AlignmentGrad alignment_loss_grad(std::span<const Mat> latents, const Bandwidths& bandwidths,
                                  const PairSample& pairs);

}  // namespace dape::mmd
