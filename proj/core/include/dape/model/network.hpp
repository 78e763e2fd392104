#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dape/model/encoder.hpp"
#include "dape/model/heads.hpp"

namespace dape::model {

// dape:   private encoder per source, shared classifier, alignment loss.
// adape:  dape with batch statistics at inference.
// local:  independent encoder + classifier per source (no sharing).
// global: per-source channel adapter, one shared encoder and classifier.
// dann:   global topology plus gradient reversal and a source-ID head.
enum class Variant { kDape, kAdape, kLocal, kGlobal, kDann };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

struct SourceShape {
  int channels = 0;
  int length = 0;  // window samples
};

struct NetworkConfig {
  Variant variant = Variant::kDape;
  EncoderConfig encoder;
  std::vector<int> classifier_hidden;
  int num_classes = 3;
  std::vector<SourceShape> sources;
  int common_channels = 0;  // global/dann; 0 selects the smallest source channel count
  std::vector<int> domain_hidden;
  std::uint64_t seed = 0;

  void validate() const;
  int resolved_common_channels() const;
};

nlohmann::json to_json(const EncoderConfig& c);
EncoderConfig encoder_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NetworkConfig& c);
NetworkConfig network_config_from_json(const nlohmann::json& j);

struct SourceTrace {
  Mat adapted;  // adapter output (shared-encoder variants only)
  EncoderTrace encoder;
};

class Network {
 public:
  Network() = default;
  explicit Network(const NetworkConfig& cfg);

  const NetworkConfig& config() const { return cfg_; }
  Variant variant() const { return cfg_.variant; }
  int num_sources() const { return static_cast<int>(cfg_.sources.size()); }
  bool shared_encoder() const { return cfg_.variant == Variant::kGlobal || cfg_.variant == Variant::kDann; }
  int n_z() const { return cfg_.encoder.n_z; }

  Encoder& encoder_for(int source);
  Classifier& classifier_for(int source);
  ChannelAdapter* adapter_for(int source);
  Classifier* domain_head() { return domain_head_ ? &*domain_head_ : nullptr; }

  // (channels_k x batch*length_k) window batch -> (batch x n_z) latents.
  Mat encode(int source, const Mat& x, int batch, Mode mode, SourceTrace* trace);
  void encode_backward(int source, const Mat& x, const SourceTrace& trace, const Mat& dz, Mat* dx);
  Mat classify(int source, const Mat& z, ClassifierTrace* trace);

  void visit(const ParamVisitor& fn);
  void visit(const ConstParamVisitor& fn) const;
  void zero_grad();
  std::size_t parameter_count() const;

 private:
  NetworkConfig cfg_;
  std::vector<Encoder> encoders_;
  std::vector<Classifier> classifiers_;
  std::vector<ChannelAdapter> adapters_;
  std::optional<Classifier> domain_head_;
};

}  // namespace dape::model
