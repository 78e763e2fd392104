#include "dape/model/network.hpp"

#include <algorithm>

#include "dape/error.hpp"

namespace dape::model {

using nlohmann::json;

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kDape: return "dape";
    case Variant::kAdape: return "adape";
    case Variant::kLocal: return "local";
    case Variant::kGlobal: return "global";
    case Variant::kDann: return "dann";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  if (s == "dape") return Variant::kDape;
  if (s == "adape") return Variant::kAdape;
  if (s == "local") return Variant::kLocal;
  if (s == "global") return Variant::kGlobal;
  if (s == "dann") return Variant::kDann;
  throw ConfigError("unknown variant '" + std::string(s) + "' (expected dape, adape, local, global or dann)");
}

void NetworkConfig::validate() const {
  if (sources.empty()) throw ConfigError("network: no sources");
  if (num_classes < 2) throw ConfigError("network: need at least two classes");
  for (const auto& s : sources) {
    if (s.channels < 1) throw ConfigError("network: source channels must be positive");
    encoder.validate(s.length);
  }
  for (const int h : classifier_hidden) {
    if (h < 1) throw ConfigError("network: classifier hidden sizes must be positive");
  }
  if (variant == Variant::kGlobal || variant == Variant::kDann) {
    const int c = resolved_common_channels();
    for (const auto& s : sources) {
      if (c > s.channels) throw ConfigError("network: common_channels exceeds a source's channel count");
    }
  }
  if (variant == Variant::kDann && sources.size() < 2) throw ConfigError("network: dann needs at least two sources");
}

int NetworkConfig::resolved_common_channels() const {
  if (common_channels > 0) return common_channels;
  int c = sources.front().channels;
  for (const auto& s : sources) c = std::min(c, s.channels);
  return c;
}

json to_json(const EncoderConfig& c) {
  return {{"n_z", c.n_z},
          {"filters", c.filters},
          {"kernel_length", c.kernel_length},
          {"pool_length", c.pool_length},
          {"pool_stride", c.pool_stride},
          {"adaptive_bn", c.adaptive_bn},
          {"bn_eps", c.bn_eps},
          {"bn_momentum", c.bn_momentum}};
}

EncoderConfig encoder_config_from_json(const json& j) {
  EncoderConfig c;
  c.n_z = j.at("n_z").get<int>();
  c.filters = j.at("filters").get<std::vector<int>>();
  c.kernel_length = j.at("kernel_length").get<int>();
  c.pool_length = j.at("pool_length").get<int>();
  c.pool_stride = j.at("pool_stride").get<int>();
  c.adaptive_bn = j.at("adaptive_bn").get<bool>();
  c.bn_eps = j.at("bn_eps").get<double>();
  c.bn_momentum = j.at("bn_momentum").get<double>();
  return c;
}

json to_json(const NetworkConfig& c) {
  json sources = json::array();
  for (const auto& s : c.sources) sources.push_back({{"channels", s.channels}, {"length", s.length}});
  return {{"variant", std::string(to_string(c.variant))},
          {"encoder", to_json(c.encoder)},
          {"classifier_hidden", c.classifier_hidden},
          {"num_classes", c.num_classes},
          {"sources", sources},
          {"common_channels", c.common_channels},
          {"domain_hidden", c.domain_hidden},
          {"seed", c.seed}};
}

NetworkConfig network_config_from_json(const json& j) {
  NetworkConfig c;
  try {
    c.variant = parse_variant(j.at("variant").get<std::string>());
    c.encoder = encoder_config_from_json(j.at("encoder"));
    c.classifier_hidden = j.at("classifier_hidden").get<std::vector<int>>();
    c.num_classes = j.at("num_classes").get<int>();
    for (const auto& s : j.at("sources")) c.sources.push_back({s.at("channels").get<int>(), s.at("length").get<int>()});
    c.common_channels = j.at("common_channels").get<int>();
    c.domain_hidden = j.at("domain_hidden").get<std::vector<int>>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw DataError(std::string("network config: ") + e.what());
  }
  return c;
}

namespace {

template <typename Module>
void prefix_names(Module& m, const std::string& prefix) {
  m.visit(ParamVisitor([&](Param& p) { p.name = prefix + "." + p.name; }));
}

}  // namespace

Network::Network(const NetworkConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int m = num_sources();
  EncoderConfig enc = cfg_.encoder;
  if (cfg_.variant == Variant::kAdape) enc.adaptive_bn = true;
  if (cfg_.variant == Variant::kDape) enc.adaptive_bn = false;
  cfg_.encoder = enc;

  if (shared_encoder()) {
    const int common = cfg_.resolved_common_channels();
    Rng rng(derive_seed(cfg_.seed, "init.encoder", 0));
    encoders_.emplace_back(enc, common, rng);
    prefix_names(encoders_.back(), "encoder");
    for (int k = 0; k < m; ++k) {
      adapters_.emplace_back("adapter" + std::to_string(k), cfg_.sources[static_cast<std::size_t>(k)].channels, common);
    }
  } else {
    for (int k = 0; k < m; ++k) {
      Rng rng(derive_seed(cfg_.seed, "init.encoder", static_cast<std::uint64_t>(k)));
      encoders_.emplace_back(enc, cfg_.sources[static_cast<std::size_t>(k)].channels, rng);
      prefix_names(encoders_.back(), "encoder" + std::to_string(k));
    }
  }
  const int n_classifiers = cfg_.variant == Variant::kLocal ? m : 1;
  for (int k = 0; k < n_classifiers; ++k) {
    Rng rng(derive_seed(cfg_.seed, "init.classifier", static_cast<std::uint64_t>(k)));
    const std::string name = n_classifiers == 1 ? "classifier" : "classifier" + std::to_string(k);
    classifiers_.emplace_back(name, enc.n_z, cfg_.classifier_hidden, cfg_.num_classes, rng);
  }
  if (cfg_.variant == Variant::kDann) {
    Rng rng(derive_seed(cfg_.seed, "init.domain_head", 0));
    domain_head_.emplace("domain_head", enc.n_z, cfg_.domain_hidden, m, rng);
  }
}

Encoder& Network::encoder_for(int source) {
  return shared_encoder() ? encoders_.front() : encoders_.at(static_cast<std::size_t>(source));
}

Classifier& Network::classifier_for(int source) {
  return classifiers_.size() == 1 ? classifiers_.front() : classifiers_.at(static_cast<std::size_t>(source));
}

ChannelAdapter* Network::adapter_for(int source) {
  return adapters_.empty() ? nullptr : &adapters_.at(static_cast<std::size_t>(source));
}

Mat Network::encode(int source, const Mat& x, int batch, Mode mode, SourceTrace* trace) {
  const auto& shape = cfg_.sources.at(static_cast<std::size_t>(source));
  if (ChannelAdapter* a = adapter_for(source)) {
    Mat adapted = a->forward(x);
    Mat z = encoder_for(source).forward(adapted, batch, shape.length, mode, trace ? &trace->encoder : nullptr);
    if (trace) trace->adapted = std::move(adapted);
    return z;
  }
  return encoder_for(source).forward(x, batch, shape.length, mode, trace ? &trace->encoder : nullptr);
}

void Network::encode_backward(int source, const Mat& x, const SourceTrace& trace, const Mat& dz, Mat* dx) {
  if (ChannelAdapter* a = adapter_for(source)) {
    Mat dadapted;
    encoder_for(source).backward(trace.encoder, dz, &dadapted);
    Mat d = a->backward(x, dadapted);
    if (dx) *dx = std::move(d);
    return;
  }
  encoder_for(source).backward(trace.encoder, dz, dx);
}

Mat Network::classify(int source, const Mat& z, ClassifierTrace* trace) {
  return classifier_for(source).forward(z, trace);
}

void Network::visit(const ParamVisitor& fn) {
  for (auto& a : adapters_) fn(a.weight);
  for (auto& e : encoders_) e.visit(fn);
  for (auto& c : classifiers_) c.visit(fn);
  if (domain_head_) domain_head_->visit(fn);
}

void Network::visit(const ConstParamVisitor& fn) const {
  const_cast<Network*>(this)->visit(ParamVisitor([&](Param& p) { fn(p); }));
}

void Network::zero_grad() {
  visit(ParamVisitor([](Param& p) { p.zero_grad(); }));
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  visit(ConstParamVisitor([&](const Param& p) {
    if (p.trainable) n += static_cast<std::size_t>(p.value.size());
  }));
  return n;
}

}  // namespace dape::model
