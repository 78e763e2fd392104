#include "dape/model/layers.hpp"

#include <cmath>

#include "dape/error.hpp"

namespace dape::model {

void init_fan_in_uniform(Mat& m, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
}

Mat im2col(const Mat& in, int batch, int time, int k) {
  const int out_t = time - k + 1;
  if (out_t < 1) throw ConfigError("im2col: kernel longer than input");
  const Eigen::Index rows = in.rows();
  Mat cols(rows * k, static_cast<Eigen::Index>(batch) * out_t);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double* src = in.row(r).data();
    for (int j = 0; j < k; ++j) {
      double* dst = cols.row(r * k + j).data();
      for (int b = 0; b < batch; ++b) {
        std::copy_n(src + static_cast<std::ptrdiff_t>(b) * time + j, out_t, dst + static_cast<std::ptrdiff_t>(b) * out_t);
      }
    }
  }
  return cols;
}

Mat col2im(const Mat& cols, int rows, int batch, int time, int k) {
  const int out_t = time - k + 1;
  Mat out = Mat::Zero(rows, static_cast<Eigen::Index>(batch) * time);
  for (int r = 0; r < rows; ++r) {
    double* dst = out.row(r).data();
    for (int j = 0; j < k; ++j) {
      const double* src = cols.row(static_cast<Eigen::Index>(r) * k + j).data();
      for (int b = 0; b < batch; ++b) {
        double* d = dst + static_cast<std::ptrdiff_t>(b) * time + j;
        const double* s = src + static_cast<std::ptrdiff_t>(b) * out_t;
        for (int t = 0; t < out_t; ++t) d[t] += s[t];
      }
    }
  }
  return out;
}

Mat batchnorm_forward(const Mat& x, const Mat& gamma, const Mat& beta, Mat& running_mean, Mat& running_var,
                      bool batch_stats, bool update_running, double momentum, double eps, BatchNormCache& cache) {
  const Eigen::Index rows = x.rows();
  const Eigen::Index n = x.cols();
  cache.batch_stats = batch_stats;
  cache.inv_std.resize(rows);
  cache.xhat.resize(rows, n);
  Mat y(rows, n);
  if (batch_stats && n < 2) throw ConfigError("batch norm needs at least two values per feature");
  for (Eigen::Index r = 0; r < rows; ++r) {
    double mean, var;
    if (batch_stats) {
      mean = x.row(r).sum() / static_cast<double>(n);
      var = (x.row(r).array() - mean).square().sum() / static_cast<double>(n);
      if (update_running) {
        running_mean(0, r) = (1.0 - momentum) * running_mean(0, r) + momentum * mean;
        running_var(0, r) = (1.0 - momentum) * running_var(0, r) +
                            momentum * var * static_cast<double>(n) / static_cast<double>(n - 1);
      }
    } else {
      mean = running_mean(0, r);
      var = running_var(0, r);
    }
    const double inv = 1.0 / std::sqrt(var + eps);
    cache.inv_std(r) = inv;
    cache.xhat.row(r) = (x.row(r).array() - mean) * inv;
    y.row(r) = cache.xhat.row(r).array() * gamma(0, r) + beta(0, r);
  }
  return y;
}

Mat batchnorm_backward(const Mat& dy, const Mat& gamma, const BatchNormCache& cache, Mat& dgamma, Mat& dbeta) {
  const Eigen::Index rows = dy.rows();
  const double n = static_cast<double>(dy.cols());
  Mat dx(rows, dy.cols());
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double sum_dy = dy.row(r).sum();
    const double sum_dy_xhat = dy.row(r).dot(cache.xhat.row(r));
    dbeta(0, r) += sum_dy;
    dgamma(0, r) += sum_dy_xhat;
    const double g = gamma(0, r) * cache.inv_std(r);
    if (cache.batch_stats) {
      dx.row(r) = (g / n) * (n * dy.row(r).array() - sum_dy - cache.xhat.row(r).array() * sum_dy_xhat);
    } else {
      dx.row(r) = g * dy.row(r);
    }
  }
  return dx;
}

Mat elu_forward(const Mat& x) {
  Mat y(x.rows(), x.cols());
  y.array() = x.array().max(0.0) + (x.array().min(0.0).exp() - 1.0);
  return y;
}

Mat elu_backward(const Mat& dy, const Mat& y) {
  Mat dx(dy.rows(), dy.cols());
  dx.array() = dy.array() * (y.array().min(0.0) + 1.0);
  return dx;
}

int pooled_length(int time, int length, int stride) {
  if (time < length) return 0;
  return (time - length) / stride + 1;
}

Mat maxpool_forward(const Mat& x, int batch, int time, int length, int stride, MaxPoolCache& cache) {
  const int out_t = pooled_length(time, length, stride);
  if (out_t < 1) throw ConfigError("max pool: input shorter than the pool length");
  cache.time_in = time;
  cache.time_out = out_t;
  const Eigen::Index rows = x.rows();
  Mat y(rows, static_cast<Eigen::Index>(batch) * out_t);
  cache.argmax.resize(static_cast<std::size_t>(y.size()));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double* src = x.row(r).data();
    double* dst = y.row(r).data();
    for (int b = 0; b < batch; ++b) {
      for (int t = 0; t < out_t; ++t) {
        const Eigen::Index start = static_cast<Eigen::Index>(b) * time + static_cast<Eigen::Index>(t) * stride;
        Eigen::Index best = start;
        for (int j = 1; j < length; ++j) {
          if (src[start + j] > src[best]) best = start + j;
        }
        const Eigen::Index o = static_cast<Eigen::Index>(b) * out_t + t;
        dst[o] = src[best];
        cache.argmax[static_cast<std::size_t>(r * y.cols() + o)] = best;
      }
    }
  }
  return y;
}

Mat maxpool_backward(const Mat& dy, const MaxPoolCache& cache, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<std::size_t>(dy.size()) != cache.argmax.size() || dy.rows() != rows)
    throw ConfigError("maxpool_backward: gradient shape does not match the forward pass");
  Mat dx = Mat::Zero(rows, cols);
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double* g = dy.row(r).data();
    double* d = dx.row(r).data();
    for (Eigen::Index o = 0; o < dy.cols(); ++o) d[cache.argmax[static_cast<std::size_t>(r * dy.cols() + o)]] += g[o];
  }
  return dx;
}

namespace {

struct Bin {
  Eigen::Index start, end;
};

Bin adaptive_bin(int j, int in, int out) {
  const auto start = static_cast<Eigen::Index>((static_cast<long>(j) * in) / out);
  const auto end = static_cast<Eigen::Index>(((static_cast<long>(j) + 1) * in + out - 1) / out);
  return {start, end};
}

}  // namespace

Mat adaptive_avgpool_forward(const Mat& x, int batch, int time, int out_features) {
  const int features = static_cast<int>(x.rows());
  Mat z(batch, out_features);
  for (int b = 0; b < batch; ++b) {
    for (int j = 0; j < out_features; ++j) {
      const Bin bin = adaptive_bin(j, features, out_features);
      const double s = x.block(bin.start, static_cast<Eigen::Index>(b) * time, bin.end - bin.start, time).sum();
      z(b, j) = s / static_cast<double>((bin.end - bin.start) * time);
    }
  }
  return z;
}

Mat adaptive_avgpool_backward(const Mat& dz, int features, int batch, int time) {
  const int out_features = static_cast<int>(dz.cols());
  Mat dx = Mat::Zero(features, static_cast<Eigen::Index>(batch) * time);
  for (int b = 0; b < batch; ++b) {
    for (int j = 0; j < out_features; ++j) {
      const Bin bin = adaptive_bin(j, features, out_features);
      const double g = dz(b, j) / static_cast<double>((bin.end - bin.start) * time);
      dx.block(bin.start, static_cast<Eigen::Index>(b) * time, bin.end - bin.start, time).array() += g;
    }
  }
  return dx;
}

}  // namespace dape::model
