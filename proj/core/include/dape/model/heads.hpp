#pragma once

#include <string>
#include <vector>

#include "dape/linalg.hpp"
#include "dape/model/layers.hpp"
#include "dape/random.hpp"

namespace dape::model {

// y = x W^T + b, rows are samples.
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& prefix, int in, int out, Rng& rng);

  int in_features() const { return static_cast<int>(weight.value.cols()); }
  int out_features() const { return static_cast<int>(weight.value.rows()); }

  Mat forward(const Mat& x) const;
  // Accumulates parameter gradients and returns d loss / d x.
  Mat backward(const Mat& x, const Mat& dy);

  Param weight;  // out x in
  Param bias;    // 1 x out
};

struct ClassifierTrace {
  std::vector<Mat> inputs;  // input of each linear layer
  std::vector<Mat> acts;    // ELU outputs of hidden layers
};

// Shared classifier: affine layers with ELU between them. With no hidden
// layers it is a single affine map n_z -> outputs.
class Classifier {
 public:
  Classifier() = default;
  Classifier(const std::string& prefix, int in, const std::vector<int>& hidden, int out, Rng& rng);

  int in_features() const { return layers_.front().in_features(); }
  int out_features() const { return layers_.back().out_features(); }

  Mat forward(const Mat& z, ClassifierTrace* trace) const;
  Mat backward(const ClassifierTrace& trace, const Mat& dlogits);

  std::vector<Linear>& layers() { return layers_; }
  void visit(const ParamVisitor& fn);
  void visit(const ConstParamVisitor& fn) const;

 private:
  std::vector<Linear> layers_;
};

// Learned per-source linear map over the channel axis, applied at every
// time step: (C_k x batch*length) -> (C_common x batch*length).
// Initialised to the truncated identity.
class ChannelAdapter {
 public:
  ChannelAdapter() = default;
  ChannelAdapter(const std::string& prefix, int in_channels, int out_channels);

  int in_channels() const { return static_cast<int>(weight.value.cols()); }
  int out_channels() const { return static_cast<int>(weight.value.rows()); }

  Mat forward(const Mat& x) const;
  Mat backward(const Mat& x, const Mat& dy);

  Param weight;  // C_common x C_k
};

// Gradient reversal: identity forward, gradient scaled by -lambda backward.
inline const Mat& grad_reverse_forward(const Mat& z) { return z; }
inline Mat grad_reverse_backward(const Mat& dz, double lambda) { return -lambda * dz; }

}  // namespace dape::model
