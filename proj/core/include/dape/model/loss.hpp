#pragma once

#include <span>
#include <vector>

#include "dape/linalg.hpp"

namespace dape::model {

struct LossGrad {
  double loss = 0.0;
  Mat grad;  // d loss / d logits
};

// Softmax cross-entropy with mean reduction over rows:
//   loss = (1/N) sum_i w_i * (-log softmax(logits_i)[label_i])
// Weights default to 1. Throws DivergenceError on non-finite logits.
LossGrad cross_entropy(const Mat& logits, std::span<const int> labels, std::span<const double> weights = {});

// Row-wise argmax.
std::vector<int> argmax_rows(const Mat& logits);

}  // namespace dape::model
