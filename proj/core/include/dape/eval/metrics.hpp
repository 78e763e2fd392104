#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dape/eval/linear_svm.hpp"
#include "dape/model/network.hpp"
#include "dape/signalio/epoch_store.hpp"

namespace dape::eval {

struct ProbeConfig {
  double train_fraction = 0.8;
  double c = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const ProbeConfig& c);
ProbeConfig probe_config_from_json(const nlohmann::json& j);

// One latent vector per window, tagged with its source and class.
struct LatentTable {
  Mat z;
  std::vector<int> source;
  std::vector<int> label;
};

LatentTable extract_representations(model::Network& net, const signalio::EpochStore& store,
                                    signalio::Split split, int batch_size, int min_batch);

struct TaskMetrics {
  std::vector<double> acc_per_source;
  std::vector<std::size_t> n_per_source;
  double acc_macro = 0.0;
  double acc_pooled = 0.0;
};

TaskMetrics task_accuracy(model::Network& net, const signalio::EpochStore& store, int batch_size,
                          int min_batch, signalio::Split split = signalio::Split::kTest);

struct ProbeResult {
  double accuracy = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  int num_sources = 0;
};

// Seeded per-source split of the rows, z-scoring on the probe-train part
// and a one-vs-rest linear SVM predicting the source.
ProbeResult domain_probe(const LatentTable& latents, int num_sources, const ProbeConfig& cfg);

struct MetricsReport {
  std::string variant;  // row label
  std::string store_hash;
  TaskMetrics task;
  ProbeResult probe;
  double chance_task = 0.0;
  double chance_domain = 0.0;
  int best_epoch = 0;
};

nlohmann::json to_json(const MetricsReport& r);
nlohmann::json to_json(const ProbeResult& r);

// Row label of a saved run: its variant, with a suffix when alignment was
// disabled.
std::string run_label(const nlohmann::json& run_config);

// Loads best.ckpt and config.json of a run and evaluates it on `store`.
// Throws DataError when the run was trained on a different store.
MetricsReport evaluate_run(const std::filesystem::path& run_dir, const signalio::EpochStore& store);

// Fixed row order (local, global, dann, dape, adape, then the rest in input
// order). Throws DataError unless every report shares one store hash.
std::string make_table_csv(std::vector<MetricsReport> reports);
std::vector<MetricsReport> order_reports(std::vector<MetricsReport> reports);

}  // namespace dape::eval
