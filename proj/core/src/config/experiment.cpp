#include "dape/config/experiment.hpp"

#include <cmath>
#include <set>
#include <string>

#include "dape/error.hpp"
#include "dape/io.hpp"
#include "dape/random.hpp"
#include "dape/version.hpp"

namespace dape::config {
namespace {

using json = nlohmann::json;

// Reads optional keys of one JSON object and rejects any it was not asked
// about.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

synthgen::SynthSourceSpec parse_source(const json& j, const std::string& path) {
  synthgen::SynthSourceSpec s;
  Section sec(j, path);
  std::string mode = std::string(signalio::to_string(s.label_mode));
  sec.get("name", s.name);
  sec.get("channels", s.channels);
  sec.get("sampling_rate_hz", s.sampling_rate);
  sec.get("amplitude_scale", s.amplitude_scale);
  sec.get("noise_std", s.noise_std);
  sec.get("dc_offset", s.dc_offset);
  sec.get("mixing_seed", s.mixing_seed);
  sec.get("trials_per_class", s.trials_per_class);
  sec.get("trial_seconds", s.trial_seconds);
  sec.get("baseline_seconds", s.baseline_seconds);
  sec.get("label_mode", mode);
  sec.finish();
  try {
    s.label_mode = signalio::parse_label_mode(mode);
  } catch (const Error&) {
    throw ConfigError(path + ".label_mode: unknown value '" + mode + "'");
  }
  return s;
}

json source_json(const synthgen::SynthSourceSpec& s) {
  return {{"name", s.name},
          {"channels", s.channels},
          {"sampling_rate_hz", s.sampling_rate},
          {"amplitude_scale", s.amplitude_scale},
          {"noise_std", s.noise_std},
          {"dc_offset", s.dc_offset},
          {"mixing_seed", s.mixing_seed},
          {"trials_per_class", s.trials_per_class},
          {"trial_seconds", s.trial_seconds},
          {"baseline_seconds", s.baseline_seconds},
          {"label_mode", signalio::to_string(s.label_mode)}};
}

}  // namespace

void ExperimentConfig::validate() const {
  for (const auto& s : sources) s.validate();
  classes.validate();
  if (!(preprocess.window_seconds > 0.0)) throw ConfigError("preprocess.window_seconds must be positive");
  if (!(preprocess.band_low_hz > 0.0 && preprocess.band_low_hz < preprocess.band_high_hz))
    throw ConfigError("preprocess: band edges must satisfy 0 < low < high");
  if (preprocess.filter_order < 1) throw ConfigError("preprocess.filter_order must be >= 1");
  if (preprocess.baseline_seconds < 0.0) throw ConfigError("preprocess.baseline_seconds must be >= 0");
  const auto& r = preprocess.ratios;
  if (r.train <= 0.0 || r.val <= 0.0 || r.test <= 0.0 || std::abs(r.train + r.val + r.test - 1.0) > 1e-9)
    throw ConfigError("preprocess.split: ratios must be positive and sum to 1");
  if (model.encoder.n_z < 1) throw ConfigError("model.n_z must be >= 1");
  train.validate();
  probe.validate();
}

std::uint64_t ExperimentConfig::synth_seed() const { return derive_seed(seed, "synth", 0); }
std::uint64_t ExperimentConfig::prepare_seed() const { return derive_seed(seed, "prepare", 0); }

train::TrainConfig ExperimentConfig::train_config(model::Variant variant) const {
  train::TrainConfig t = train;
  t.variant = variant;
  t.seed = derive_seed(seed, "train", 0);
  return t;
}

model::NetworkConfig ExperimentConfig::network_config(const signalio::EpochStore& store,
                                                      model::Variant variant) const {
  auto cfg = train::network_config_for(store, variant, model.encoder, model.classifier_hidden,
                                       derive_seed(seed, "network", 0));
  cfg.domain_hidden = model.domain_hidden;
  cfg.common_channels = model.common_channels;
  return cfg;
}

ExperimentConfig parse_experiment(const json& j) {
  ExperimentConfig c;
  Section top(j, "config");
  int version = kSchemaVersion;
  top.get("schema_version", version);
  if (version != kSchemaVersion)
    throw ConfigError("config: unsupported schema_version " + std::to_string(version));
  top.get("seed", c.seed);

  if (const json* src = top.child("sources")) {
    if (!src->is_array()) throw ConfigError("config.sources: expected an array");
    for (std::size_t i = 0; i < src->size(); ++i)
      c.sources.push_back(parse_source((*src)[i], "config.sources[" + std::to_string(i) + "]"));
  }
  if (const json* cl = top.child("classes")) {
    Section sec(*cl, top.path("classes"));
    sec.get("frequency_hz", c.classes.frequency_hz);
    sec.get("amplitude", c.classes.amplitude);
    sec.finish();
  }
  if (const json* pp = top.child("preprocess")) {
    Section sec(*pp, top.path("preprocess"));
    sec.get("baseline_seconds", c.preprocess.baseline_seconds);
    sec.get("band_low_hz", c.preprocess.band_low_hz);
    sec.get("band_high_hz", c.preprocess.band_high_hz);
    sec.get("filter_order", c.preprocess.filter_order);
    sec.get("window_seconds", c.preprocess.window_seconds);
    if (const json* sp = sec.child("split")) {
      Section s2(*sp, sec.path("split"));
      s2.get("train", c.preprocess.ratios.train);
      s2.get("val", c.preprocess.ratios.val);
      s2.get("test", c.preprocess.ratios.test);
      s2.finish();
    }
    sec.finish();
  }
  if (const json* m = top.child("model")) {
    Section sec(*m, top.path("model"));
    auto& e = c.model.encoder;
    sec.get("n_z", e.n_z);
    sec.get("filters", e.filters);
    sec.get("kernel_length", e.kernel_length);
    sec.get("pool_length", e.pool_length);
    sec.get("pool_stride", e.pool_stride);
    sec.get("bn_eps", e.bn_eps);
    sec.get("bn_momentum", e.bn_momentum);
    sec.get("classifier_hidden", c.model.classifier_hidden);
    sec.get("domain_hidden", c.model.domain_hidden);
    sec.get("common_channels", c.model.common_channels);
    sec.finish();
  }
  if (const json* t = top.child("train")) {
    Section sec(*t, top.path("train"));
    sec.get("batch_size", c.train.batch_size);
    sec.get("epochs", c.train.epochs);
    sec.get("threads", c.train.threads);
    sec.get("eval_min_batch", c.train.eval_min_batch);
    if (const json* o = sec.child("optimizer")) {
      Section s2(*o, sec.path("optimizer"));
      std::string name = "adam";
      s2.get("name", name);
      if (name != "adam") throw ConfigError("config.train.optimizer.name: only 'adam' is supported");
      s2.get("learning_rate", c.train.adam.learning_rate);
      s2.get("beta1", c.train.adam.beta1);
      s2.get("beta2", c.train.adam.beta2);
      s2.get("eps", c.train.adam.eps);
      s2.finish();
    }
    sec.finish();
  }
  if (const json* a = top.child("align")) {
    Section sec(*a, top.path("align"));
    sec.get("enabled", c.train.align);
    sec.get("bandwidths", c.train.bandwidths.sigma);
    if (const json* k = sec.child("kappa")) {
      Section s2(*k, sec.path("kappa"));
      s2.get("start_epoch", c.train.kappa.start_epoch);
      s2.get("rate", c.train.kappa.rate);
      s2.get("cap", c.train.kappa.cap);
      s2.finish();
    }
    sec.finish();
  }
  c.probe.seed = c.seed;
  if (const json* p = top.child("probe")) {
    Section sec(*p, top.path("probe"));
    sec.get("train_fraction", c.probe.train_fraction);
    sec.get("c", c.probe.c);
    sec.get("seed", c.probe.seed);
    sec.finish();
  }
  top.finish();
  c.validate();
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_experiment(j);
}

json to_json(const ExperimentConfig& c) {
  json sources = json::array();
  for (const auto& s : c.sources) sources.push_back(source_json(s));
  const auto& e = c.model.encoder;
  const auto& t = c.train;
  return {{"schema_version", kSchemaVersion},
          {"seed", c.seed},
          {"sources", sources},
          {"classes", {{"frequency_hz", c.classes.frequency_hz}, {"amplitude", c.classes.amplitude}}},
          {"preprocess",
           {{"baseline_seconds", c.preprocess.baseline_seconds},
            {"band_low_hz", c.preprocess.band_low_hz},
            {"band_high_hz", c.preprocess.band_high_hz},
            {"filter_order", c.preprocess.filter_order},
            {"window_seconds", c.preprocess.window_seconds},
            {"split",
             {{"train", c.preprocess.ratios.train},
              {"val", c.preprocess.ratios.val},
              {"test", c.preprocess.ratios.test}}}}},
          {"model",
           {{"n_z", e.n_z},
            {"filters", e.filters},
            {"kernel_length", e.kernel_length},
            {"pool_length", e.pool_length},
            {"pool_stride", e.pool_stride},
            {"bn_eps", e.bn_eps},
            {"bn_momentum", e.bn_momentum},
            {"classifier_hidden", c.model.classifier_hidden},
            {"domain_hidden", c.model.domain_hidden},
            {"common_channels", c.model.common_channels}}},
          {"train",
           {{"batch_size", t.batch_size},
            {"epochs", t.epochs},
            {"threads", t.threads},
            {"eval_min_batch", t.eval_min_batch},
            {"optimizer",
             {{"name", "adam"},
              {"learning_rate", t.adam.learning_rate},
              {"beta1", t.adam.beta1},
              {"beta2", t.adam.beta2},
              {"eps", t.adam.eps}}}}},
          {"align",
           {{"enabled", t.align},
            {"bandwidths", t.bandwidths.sigma},
            {"kappa", {{"start_epoch", t.kappa.start_epoch}, {"rate", t.kappa.rate}, {"cap", t.kappa.cap}}}}},
          {"probe", eval::to_json(c.probe)}};
}

ExperimentConfig reference_experiment() {
  ExperimentConfig c;
  c.seed = 20240611;
  c.sources = synthgen::reference_sources();
  c.model.encoder.filters = {8, 8, 16, 32, 64};
  c.model.encoder.kernel_length = 5;
  c.train.epochs = 100;
  c.probe.seed = c.seed;
  c.validate();
  return c;
}

}  // namespace dape::config
