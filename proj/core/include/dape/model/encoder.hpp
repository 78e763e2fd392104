#pragma once

#include <vector>

#include "dape/linalg.hpp"
#include "dape/model/layers.hpp"
#include "dape/random.hpp"

namespace dape::model {

struct EncoderConfig {
  int n_z = 50;
  // Temporal filters, spatial filters, then one entry per further conv block.
  std::vector<int> filters = {25, 25, 50, 100, 200};
  int kernel_length = 10;
  int pool_length = 3;
  int pool_stride = 3;
  bool adaptive_bn = false;
  double bn_eps = 1e-5;
  double bn_momentum = 0.1;

  // Throws ConfigError if any conv or pool stage would be degenerate for
  // windows of `length` samples.
  void validate(int length) const;
  // Time steps left before the final adaptive pooling.
  int final_time(int length) const;
};

struct BatchNormParams {
  Param gamma, beta, running_mean, running_var;
};

struct EncoderStageTrace {
  Mat col;
  int time_in = 0;
  int time_conv = 0;
  BatchNormCache bn;
  Mat act;
  MaxPoolCache pool;
};

struct EncoderTrace {
  int batch = 0;
  int length = 0;
  Mat fused_weight;
  std::vector<EncoderStageTrace> stages;
  int final_time = 0;
};

// DeepConvNet-style private encoder:
//   temporal conv (shared across channels) -> spatial conv over all
//   channels -> BN -> ELU -> max-pool, then per extra block
//   conv -> BN -> ELU -> max-pool, and finally an adaptive average pool of
//   the (feature, time) plane to (n_z, 1).
// The temporal and spatial convolutions are linear and adjacent, so the
// forward pass applies their product as one convolution; gradients are
// propagated back to both factors.
class Encoder {
 public:
  Encoder() = default;
  Encoder(const EncoderConfig& cfg, int in_channels, Rng& rng);

  const EncoderConfig& config() const { return cfg_; }
  int in_channels() const { return in_channels_; }

  // x: (channels x batch*length). Returns the (batch x n_z) latents.
  Mat forward(const Mat& x, int batch, int length, Mode mode, EncoderTrace* trace);
  // Accumulates parameter gradients; writes d loss / d x when `dx` is set.
  void backward(const EncoderTrace& trace, const Mat& dz, Mat* dx);

  void visit(const ParamVisitor& fn);
  void visit(const ConstParamVisitor& fn) const;
  void zero_grad();

 private:
  Mat fused_weight() const;
  Mat fused_bias() const;

  EncoderConfig cfg_;
  int in_channels_ = 0;
  Param temporal_w_;   // F1 x K
  Param temporal_b_;   // 1 x F1
  Param spatial_w_;    // F2 x (C*F1), column c*F1 + f
  std::vector<Param> conv_w_;  // block i: F_{i+1} x (F_i*K)
  std::vector<BatchNormParams> bn_;
};

}  // namespace dape::model
