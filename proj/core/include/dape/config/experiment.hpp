#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "dape/eval/metrics.hpp"
#include "dape/model/network.hpp"
#include "dape/signalio/pipeline.hpp"
#include "dape/synthgen/synthgen.hpp"
#include "dape/train/trainer.hpp"

namespace dape::config {

struct ModelSection {
  model::EncoderConfig encoder;
  std::vector<int> classifier_hidden;
  std::vector<int> domain_hidden = {50};
  int common_channels = 0;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::vector<synthgen::SynthSourceSpec> sources;
  synthgen::SynthClassSpec classes;
  signalio::PreprocessConfig preprocess;
  ModelSection model;
  // Variant, seed and the alignment settings are filled in per run by
  // train_config(); the rest comes from the "train" and "align" sections.
  train::TrainConfig train;
  eval::ProbeConfig probe;

  void validate() const;

  std::uint64_t synth_seed() const;
  std::uint64_t prepare_seed() const;
  train::TrainConfig train_config(model::Variant variant) const;
  model::NetworkConfig network_config(const signalio::EpochStore& store, model::Variant variant) const;
};

// Every key is optional and defaults are filled in; unknown keys and a
// schema_version other than the current one raise ConfigError.
ExperimentConfig parse_experiment(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::filesystem::path& path);

// Fully materialised form; parse_experiment(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& c);

// The acceptance experiment: three synthetic sources and a reduced encoder.
ExperimentConfig reference_experiment();

}  // namespace dape::config
