#pragma once

#include <span>
#include <vector>

#include "dape/linalg.hpp"

namespace dape::eval {

struct SvmConfig {
  double c = 1.0;
  // Stop once ||grad|| <= tol * ||grad at w = 0||.
  double tol = 1e-6;
  int max_iter = 200;

  void validate() const;
};

// Binary L2-regularised squared-hinge model on features augmented with a
// constant 1 (the bias is regularised like any weight):
//   min_w 0.5 ||w||^2 + C sum_i max(0, 1 - y_i w.x_i)^2,  y_i in {-1, +1}
// Solved with Newton steps on the generalised Hessian and a backtracking
// line search. Returns w of size d + 1 (bias last).
Vec train_squared_hinge(const Mat& x, std::span<const int> y_pm, const SvmConfig& cfg);

// One-vs-rest ensemble of the binary model.
class LinearSvm {
 public:
  void fit(const Mat& x, std::span<const int> labels, int num_classes, const SvmConfig& cfg = {});
  // Rows are samples; columns are classes.
  Mat decision_function(const Mat& x) const;
  // Argmax of the decision values; ties go to the lower class index.
  std::vector<int> predict(const Mat& x) const;

  const Mat& weights() const { return w_; }  // classes x (d + 1)

 private:
  Mat w_;
};

// Per-column z-scoring fitted on one matrix; zero-variance columns are
// only centred.
struct Standardizer {
  Vec mean;
  Vec scale;

  static Standardizer fit(const Mat& x);
  Mat apply(const Mat& x) const;
};

}  // namespace dape::eval
