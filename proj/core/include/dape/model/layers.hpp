#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dape/linalg.hpp"
#include "dape/random.hpp"

namespace dape::model {

enum class Mode { kTrain, kEval };

// A named tensor with its gradient buffer. Non-trainable tensors (batch-norm
// running statistics) carry an empty gradient.
struct Param {
  std::string name;
  Mat value;
  Mat grad;
  bool trainable = true;

  Param() = default;
  Param(std::string n, Mat v, bool train = true)
      : name(std::move(n)), value(std::move(v)), grad(train ? Mat::Zero(value.rows(), value.cols()) : Mat()),
        trainable(train) {}
  void zero_grad() {
    if (trainable) grad.setZero();
  }
};

using ParamVisitor = std::function<void(Param&)>;
using ConstParamVisitor = std::function<void(const Param&)>;

// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation.
void init_fan_in_uniform(Mat& m, int fan_in, Rng& rng);

// Activations are stored feature-major: a (features x batch*time) matrix
// whose column b*time + t holds sample b at time t.

// Rows r*k + j of the result hold in.row(r) shifted by j, per sample; the
// output time length is time - k + 1.
Mat im2col(const Mat& in, int batch, int time, int k);
// Adjoint of im2col.
Mat col2im(const Mat& cols, int rows, int batch, int time, int k);

struct BatchNormCache {
  Mat xhat;
  Vec inv_std;
  bool batch_stats = true;
};

// Per-row normalisation over all columns. With `batch_stats` the batch
// mean/biased variance normalise the input and, when `update_running`, the
// running estimates move by `momentum` (running variance uses the unbiased
// batch variance). Otherwise the running estimates are used.
Mat batchnorm_forward(const Mat& x, const Mat& gamma, const Mat& beta, Mat& running_mean, Mat& running_var,
                      bool batch_stats, bool update_running, double momentum, double eps, BatchNormCache& cache);
Mat batchnorm_backward(const Mat& dy, const Mat& gamma, const BatchNormCache& cache, Mat& dgamma, Mat& dbeta);

Mat elu_forward(const Mat& x);
// Uses the forward output y: dy/dx = 1 for x > 0, y + 1 otherwise.
Mat elu_backward(const Mat& dy, const Mat& y);

struct MaxPoolCache {
  std::vector<Eigen::Index> argmax;  // flat column index per output element
  int time_in = 0;
  int time_out = 0;
};
int pooled_length(int time, int length, int stride);
Mat maxpool_forward(const Mat& x, int batch, int time, int length, int stride, MaxPoolCache& cache);
Mat maxpool_backward(const Mat& dy, const MaxPoolCache& cache, Eigen::Index rows, Eigen::Index cols);

// Averages each sample's (features x time) plane into (out_features x 1):
// output j averages feature rows [floor(j F / n), ceil((j+1) F / n)) over
// all time steps. Returns (batch x out_features).
Mat adaptive_avgpool_forward(const Mat& x, int batch, int time, int out_features);
Mat adaptive_avgpool_backward(const Mat& dz, int features, int batch, int time);

}  // namespace dape::model
