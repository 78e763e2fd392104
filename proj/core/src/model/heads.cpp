#include "dape/model/heads.hpp"

#include "dape/error.hpp"

namespace dape::model {

Linear::Linear(const std::string& prefix, int in, int out, Rng& rng)
    : weight(prefix + ".weight", Mat(out, in)), bias(prefix + ".bias", Mat(1, out)) {
  if (in < 1 || out < 1) throw ConfigError("linear layer sizes must be positive");
  init_fan_in_uniform(weight.value, in, rng);
  init_fan_in_uniform(bias.value, in, rng);
}

Mat Linear::forward(const Mat& x) const {
  if (x.cols() != weight.value.cols()) throw ConfigError("linear: input has the wrong number of columns");
  Mat y = x * weight.value.transpose();
  y.rowwise() += bias.value.row(0);
  return y;
}

Mat Linear::backward(const Mat& x, const Mat& dy) {
  weight.grad.noalias() += dy.transpose() * x;
  bias.grad.noalias() += dy.colwise().sum();
  return dy * weight.value;
}

Classifier::Classifier(const std::string& prefix, int in, const std::vector<int>& hidden, int out, Rng& rng) {
  int width = in;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    layers_.emplace_back(prefix + ".fc" + std::to_string(i), width, hidden[i], rng);
    width = hidden[i];
  }
  layers_.emplace_back(prefix + ".out", width, out, rng);
}

Mat Classifier::forward(const Mat& z, ClassifierTrace* trace) const {
  if (trace) {
    trace->inputs.clear();
    trace->acts.clear();
  }
  Mat h = z;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (trace) trace->inputs.push_back(h);
    h = layers_[i].forward(h);
    if (i + 1 < layers_.size()) {
      h = elu_forward(h);
      if (trace) trace->acts.push_back(h);
    }
  }
  return h;
}

Mat Classifier::backward(const ClassifierTrace& trace, const Mat& dlogits) {
  Mat d = dlogits;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    if (i + 1 < layers_.size()) d = elu_backward(d, trace.acts[i]);
    d = layers_[i].backward(trace.inputs[i], d);
  }
  return d;
}

void Classifier::visit(const ParamVisitor& fn) {
  for (auto& l : layers_) {
    fn(l.weight);
    fn(l.bias);
  }
}

void Classifier::visit(const ConstParamVisitor& fn) const {
  for (const auto& l : layers_) {
    fn(l.weight);
    fn(l.bias);
  }
}

ChannelAdapter::ChannelAdapter(const std::string& prefix, int in_channels, int out_channels)
    : weight(prefix + ".weight", Mat::Identity(out_channels, in_channels)) {
  if (in_channels < 1 || out_channels < 1 || out_channels > in_channels) {
    throw ConfigError("channel adapter: need 1 <= common channels <= source channels");
  }
}

Mat ChannelAdapter::forward(const Mat& x) const {
  if (x.rows() != weight.value.cols()) throw ConfigError("channel adapter: input channel mismatch");
  return weight.value * x;
}

Mat ChannelAdapter::backward(const Mat& x, const Mat& dy) {
  weight.grad.noalias() += dy * x.transpose();
  return weight.value.transpose() * dy;
}

}  // namespace dape::model
