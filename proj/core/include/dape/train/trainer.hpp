#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dape/mmd/mmd.hpp"
#include "dape/model/network.hpp"
#include "dape/signalio/epoch_store.hpp"
#include "dape/train/adam.hpp"
#include "dape/train/batching.hpp"
#include "dape/train/schedule.hpp"

namespace dape::train {

struct TrainConfig {
  model::Variant variant = model::Variant::kDape;
  int batch_size = 32;  // per source
  int epochs = 100;
  AdamConfig adam;
  std::uint64_t seed = 0;
  mmd::Bandwidths bandwidths;
  KappaSchedule kappa;
  // false drops the alignment term entirely (the kappa = 0 ablation).
  bool align = true;
  int threads = 1;
  int eval_min_batch = 8;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

// Network configuration matching the store's source shapes.
model::NetworkConfig network_config_for(const signalio::EpochStore& store, model::Variant variant,
                                        const model::EncoderConfig& encoder,
                                        const std::vector<int>& classifier_hidden, std::uint64_t seed);

struct EpochLog {
  int epoch = 0;
  double l_ce = 0.0;
  double l_da = 0.0;  // domain CE for dann
  double kappa = 0.0;
  double lambda = 0.0;
  std::vector<double> val_acc;
  double val_acc_macro = 0.0;
  double train_acc_macro = 0.0;
};

struct StepStats {
  double l_ce = 0.0;
  double l_da = 0.0;
  std::vector<std::size_t> correct;  // per source
  std::vector<std::size_t> seen;
};

struct StepWeights {
  double kappa = 0.0;
  double lambda = 0.0;
  bool align = true;
};

// Zeroes gradients and accumulates those of the total loss for one batch
// per source. `pairs` is ignored by variants without alignment.
StepStats compute_gradients(model::Network& net, const std::vector<SourceBatch>& batches, const StepWeights& w,
                            const mmd::PairSample& pairs, const mmd::Bandwidths& bandwidths, int threads = 1);

struct RunArtifacts {
  std::vector<EpochLog> log;
  model::Network best;
  model::Network final;
  int best_epoch = 0;
  nlohmann::json rng_trace;
};

RunArtifacts fit(const TrainConfig& cfg, const model::NetworkConfig& net_cfg, const signalio::EpochStore& store);

// fit() restricted to local, global and dann.
RunArtifacts fit_baseline(model::Variant kind, const TrainConfig& cfg, const model::NetworkConfig& net_cfg,
                          const signalio::EpochStore& store);

// Per-source validation accuracy with protocol batching.
std::vector<double> validation_accuracy(model::Network& net, const signalio::EpochStore& store,
                                        signalio::Split split, int batch_size, int min_batch);

struct RunInfo {
  std::string store_path;
  std::string store_hash;
  nlohmann::json probe;  // stored under "probe" when set
};

// Writes log.csv, best.ckpt, final.ckpt, config.json and rng.json.
void save_run(const std::filesystem::path& dir, const RunArtifacts& run, const TrainConfig& cfg,
              const model::NetworkConfig& net_cfg, const RunInfo& info);

std::string log_csv(const std::vector<EpochLog>& log, int num_sources);

}  // namespace dape::train
