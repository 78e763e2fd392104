#include "dape/model/encoder.hpp"

#include <string>

#include "dape/error.hpp"

namespace dape::model {

void EncoderConfig::validate(int length) const {
  if (n_z < 1) throw ConfigError("encoder: n_z must be >= 1");
  if (filters.size() < 2) throw ConfigError("encoder: need temporal and spatial filter counts");
  for (const int f : filters) {
    if (f < 1) throw ConfigError("encoder: filter counts must be positive");
  }
  if (kernel_length < 1 || pool_length < 1 || pool_stride < 1) {
    throw ConfigError("encoder: kernel and pool sizes must be positive");
  }
  if (!(bn_eps > 0.0) || !(bn_momentum >= 0.0 && bn_momentum <= 1.0)) {
    throw ConfigError("encoder: invalid batch-norm settings");
  }
  int t = length;
  const std::size_t stages = filters.size() - 1;
  for (std::size_t s = 0; s < stages; ++s) {
    t = t - kernel_length + 1;
    if (t < 1) {
      throw ConfigError("encoder: window of " + std::to_string(length) + " samples is too short for conv stage " +
                        std::to_string(s + 1));
    }
    t = pooled_length(t, pool_length, pool_stride);
    if (t < 1) {
      throw ConfigError("encoder: window of " + std::to_string(length) + " samples is too short for pool stage " +
                        std::to_string(s + 1));
    }
  }
}

int EncoderConfig::final_time(int length) const {
  int t = length;
  for (std::size_t s = 0; s + 1 < filters.size(); ++s) {
    t = pooled_length(t - kernel_length + 1, pool_length, pool_stride);
  }
  return t;
}

namespace {

BatchNormParams make_bn(const std::string& prefix, int features) {
  return {Param(prefix + ".weight", Mat::Ones(1, features)), Param(prefix + ".bias", Mat::Zero(1, features)),
          Param(prefix + ".running_mean", Mat::Zero(1, features), false),
          Param(prefix + ".running_var", Mat::Ones(1, features), false)};
}

}  // namespace

Encoder::Encoder(const EncoderConfig& cfg, int in_channels, Rng& rng) : cfg_(cfg), in_channels_(in_channels) {
  if (in_channels < 1) throw ConfigError("encoder: input channels must be >= 1");
  const int k = cfg.kernel_length;
  const int f1 = cfg.filters[0];
  const int f2 = cfg.filters[1];
  temporal_w_ = Param("temporal.weight", Mat(f1, k));
  temporal_b_ = Param("temporal.bias", Mat(1, f1));
  init_fan_in_uniform(temporal_w_.value, k, rng);
  init_fan_in_uniform(temporal_b_.value, k, rng);
  spatial_w_ = Param("spatial.weight", Mat(f2, in_channels * f1));
  init_fan_in_uniform(spatial_w_.value, in_channels * f1, rng);
  bn_.push_back(make_bn("bn0", f2));
  for (std::size_t i = 2; i < cfg.filters.size(); ++i) {
    const int fin = cfg.filters[i - 1];
    const int fout = cfg.filters[i];
    Param w("conv" + std::to_string(i - 1) + ".weight", Mat(fout, fin * k));
    init_fan_in_uniform(w.value, fin * k, rng);
    conv_w_.push_back(std::move(w));
    bn_.push_back(make_bn("bn" + std::to_string(i - 1), fout));
  }
}

Mat Encoder::fused_weight() const {
  const int k = cfg_.kernel_length;
  const int f1 = cfg_.filters[0];
  const int f2 = cfg_.filters[1];
  Mat w(f2, in_channels_ * k);
  for (int c = 0; c < in_channels_; ++c) {
    w.block(0, c * k, f2, k).noalias() = spatial_w_.value.block(0, c * f1, f2, f1) * temporal_w_.value;
  }
  return w;
}

Mat Encoder::fused_bias() const {
  const int f1 = cfg_.filters[0];
  const int f2 = cfg_.filters[1];
  Mat b = Mat::Zero(f2, 1);
  for (int c = 0; c < in_channels_; ++c) {
    b.noalias() += spatial_w_.value.block(0, c * f1, f2, f1) * temporal_b_.value.transpose();
  }
  return b;
}

Mat Encoder::forward(const Mat& x, int batch, int length, Mode mode, EncoderTrace* trace) {
  if (x.rows() != in_channels_ || x.cols() != static_cast<Eigen::Index>(batch) * length) {
    throw ConfigError("encoder: input shape does not match (channels x batch*length)");
  }
  cfg_.validate(length);
  const bool batch_stats = mode == Mode::kTrain || cfg_.adaptive_bn;
  if (batch_stats && batch < 2) throw ConfigError("encoder: batch statistics need a batch of at least 2");
  const bool update_running = mode == Mode::kTrain;
  const int k = cfg_.kernel_length;

  EncoderTrace local;
  EncoderTrace& tr = trace ? *trace : local;
  tr.batch = batch;
  tr.length = length;
  tr.stages.assign(cfg_.filters.size() - 1, {});
  tr.fused_weight = fused_weight();

  Mat a;
  int time = length;
  for (std::size_t s = 0; s < tr.stages.size(); ++s) {
    EncoderStageTrace& st = tr.stages[s];
    st.time_in = time;
    st.time_conv = time - k + 1;
    Mat h;
    if (s == 0) {
      st.col = im2col(x, batch, time, k);
      h.noalias() = tr.fused_weight * st.col;
      h.colwise() += fused_bias().col(0);
    } else {
      st.col = im2col(a, batch, time, k);
      h.noalias() = conv_w_[s - 1].value * st.col;
    }
    BatchNormParams& bn = bn_[s];
    Mat n = batchnorm_forward(h, bn.gamma.value, bn.beta.value, bn.running_mean.value, bn.running_var.value,
                              batch_stats, update_running, cfg_.bn_momentum, cfg_.bn_eps, st.bn);
    st.act = elu_forward(n);
    a = maxpool_forward(st.act, batch, st.time_conv, cfg_.pool_length, cfg_.pool_stride, st.pool);
    time = st.pool.time_out;
    if (!trace) st.col.resize(0, 0);
  }
  tr.final_time = time;
  return adaptive_avgpool_forward(a, batch, time, cfg_.n_z);
}

void Encoder::backward(const EncoderTrace& tr, const Mat& dz, Mat* dx) {
  const int k = cfg_.kernel_length;
  const int f1 = cfg_.filters[0];
  const int f2 = cfg_.filters[1];
  const int batch = tr.batch;
  Mat d = adaptive_avgpool_backward(dz, cfg_.filters.back(), batch, tr.final_time);
  for (std::size_t si = tr.stages.size(); si-- > 0;) {
    const EncoderStageTrace& st = tr.stages[si];
    d = maxpool_backward(d, st.pool, st.act.rows(), st.act.cols());
    d = elu_backward(d, st.act);
    BatchNormParams& bn = bn_[si];
    d = batchnorm_backward(d, bn.gamma.value, st.bn, bn.gamma.grad, bn.beta.grad);
    if (si > 0) {
      Param& w = conv_w_[si - 1];
      w.grad.noalias() += d * st.col.transpose();
      const Mat dcol = w.value.transpose() * d;
      d = col2im(dcol, cfg_.filters[si], batch, st.time_in, k);
      continue;
    }
    // First stage: chain the fused-conv gradient into both factors.
    const Mat dw = d * st.col.transpose();   // F2 x (C*K)
    const Vec db = d.rowwise().sum();        // F2
    for (int c = 0; c < in_channels_; ++c) {
      const auto w2 = spatial_w_.value.block(0, c * f1, f2, f1);
      const auto dwc = dw.block(0, c * k, f2, k);
      spatial_w_.grad.block(0, c * f1, f2, f1).noalias() += dwc * temporal_w_.value.transpose();
      spatial_w_.grad.block(0, c * f1, f2, f1).noalias() += db * temporal_b_.value;
      temporal_w_.grad.noalias() += w2.transpose() * dwc;
      temporal_b_.grad.noalias() += (w2.transpose() * db).transpose();
    }
    if (dx) {
      const Mat dcol = tr.fused_weight.transpose() * d;
      *dx = col2im(dcol, in_channels_, batch, st.time_in, k);
    }
  }
}

void Encoder::visit(const ParamVisitor& fn) {
  fn(temporal_w_);
  fn(temporal_b_);
  fn(spatial_w_);
  for (std::size_t i = 0; i < bn_.size(); ++i) {
    if (i > 0) fn(conv_w_[i - 1]);
    fn(bn_[i].gamma);
    fn(bn_[i].beta);
    fn(bn_[i].running_mean);
    fn(bn_[i].running_var);
  }
}

void Encoder::visit(const ConstParamVisitor& fn) const {
  const_cast<Encoder*>(this)->visit(ParamVisitor([&](Param& p) { fn(p); }));
}

void Encoder::zero_grad() {
  visit(ParamVisitor([](Param& p) { p.zero_grad(); }));
}

}  // namespace dape::model
