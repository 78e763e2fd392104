#include "dape/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dape/error.hpp"
#include "dape/io.hpp"
#include "dape/model/checkpoint.hpp"
#include "dape/model/loss.hpp"
#include "dape/random.hpp"
#include "dape/train/batching.hpp"
#include "dape/version.hpp"

namespace dape::eval {
namespace {

using json = nlohmann::json;

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void ProbeConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("probe.train_fraction must be in (0, 1)");
  if (!(c > 0.0)) throw ConfigError("probe.c must be positive");
}

json to_json(const ProbeConfig& c) {
  return {{"train_fraction", c.train_fraction}, {"c", c.c}, {"seed", c.seed}};
}

ProbeConfig probe_config_from_json(const json& j) {
  ProbeConfig c;
  try {
    c.train_fraction = j.at("train_fraction").get<double>();
    c.c = j.at("c").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("probe config: ") + e.what());
  }
  c.validate();
  return c;
}

LatentTable extract_representations(model::Network& net, const signalio::EpochStore& store,
                                    signalio::Split split, int batch_size, int min_batch) {
  std::vector<train::EvalOutput> parts;
  Eigen::Index rows = 0;
  LatentTable t;
  for (int k = 0; k < store.num_sources(); ++k) {
    const auto idx = store.indices(k, split);
    parts.push_back(train::evaluate_source(net, store, k, idx, batch_size, min_batch));
    rows += parts.back().latents.rows();
    t.source.insert(t.source.end(), idx.size(), k);
    t.label.insert(t.label.end(), parts.back().labels.begin(), parts.back().labels.end());
  }
  t.z.resize(rows, net.n_z());
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    t.z.middleRows(r, p.latents.rows()) = p.latents;
    r += p.latents.rows();
  }
  return t;
}

TaskMetrics task_accuracy(model::Network& net, const signalio::EpochStore& store, int batch_size, int min_batch,
                          signalio::Split split) {
  TaskMetrics m;
  std::size_t correct_total = 0;
  std::size_t n_total = 0;
  for (int k = 0; k < store.num_sources(); ++k) {
    const auto idx = store.indices(k, split);
    if (idx.empty())
      throw DataError("task_accuracy: empty " + std::string(signalio::to_string(split)) + " split for source " +
                      store.sources()[static_cast<std::size_t>(k)].name);
    const auto out = train::evaluate_source(net, store, k, idx, batch_size, min_batch);
    const auto pred = model::argmax_rows(out.logits);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == out.labels[i] ? 1 : 0;
    const double acc = static_cast<double>(correct) / static_cast<double>(idx.size());
    m.acc_per_source.push_back(acc);
    m.n_per_source.push_back(idx.size());
    m.acc_macro += acc / store.num_sources();
    correct_total += correct;
    n_total += idx.size();
  }
  m.acc_pooled = static_cast<double>(correct_total) / static_cast<double>(n_total);
  return m;
}

ProbeResult domain_probe(const LatentTable& latents, int num_sources, const ProbeConfig& cfg) {
  cfg.validate();
  if (num_sources < 2) throw DataError("domain_probe: need at least two sources");
  if (static_cast<std::size_t>(latents.z.rows()) != latents.source.size())
    throw DataError("domain_probe: row/source count mismatch");

  std::vector<std::size_t> train_rows, test_rows;
  for (int k = 0; k < num_sources; ++k) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < latents.source.size(); ++i)
      if (latents.source[i] == k) rows.push_back(i);
    Rng rng(derive_seed(cfg.seed, "probe", static_cast<std::uint64_t>(k)));
    rng.shuffle(rows);
    const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(rows.size())));
    if (n_train == 0 || n_train >= rows.size())
      throw DataError("domain_probe: source " + std::to_string(k) + " is absent from a probe split");
    std::sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_rows.insert(test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }

  auto gather = [&](const std::vector<std::size_t>& rows, Mat& x, std::vector<int>& y) {
    x.resize(static_cast<Eigen::Index>(rows.size()), latents.z.cols());
    y.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      x.row(static_cast<Eigen::Index>(r)) = latents.z.row(static_cast<Eigen::Index>(rows[r]));
      y[r] = latents.source[rows[r]];
    }
  };
  Mat xtr, xte;
  std::vector<int> ytr, yte;
  gather(train_rows, xtr, ytr);
  gather(test_rows, xte, yte);

  const auto scaler = Standardizer::fit(xtr);
  LinearSvm svm;
  SvmConfig svm_cfg;
  svm_cfg.c = cfg.c;
  svm.fit(scaler.apply(xtr), ytr, num_sources, svm_cfg);
  const auto pred = svm.predict(scaler.apply(xte));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == yte[i] ? 1 : 0;

  ProbeResult r;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  r.n_train = train_rows.size();
  r.n_test = test_rows.size();
  r.num_sources = num_sources;
  return r;
}

json to_json(const ProbeResult& r) {
  return {{"schema_version", kSchemaVersion},
          {"probe_acc", r.accuracy},
          {"n_train", r.n_train},
          {"n_test", r.n_test},
          {"chance", 1.0 / r.num_sources}};
}

json to_json(const MetricsReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"variant", r.variant},
          {"store_hash", r.store_hash},
          {"best_epoch", r.best_epoch},
          {"acc_per_source", r.task.acc_per_source},
          {"n_per_source", r.task.n_per_source},
          {"acc_macro", r.task.acc_macro},
          {"acc_pooled", r.task.acc_pooled},
          {"probe_acc", r.probe.accuracy},
          {"probe_n_train", r.probe.n_train},
          {"probe_n_test", r.probe.n_test},
          {"chance_task", r.chance_task},
          {"chance_domain", r.chance_domain}};
}

std::string run_label(const json& run_config) {
  std::string label = run_config.at("variant").get<std::string>();
  if (!run_config.at("train").at("align").get<bool>() && (label == "dape" || label == "adape"))
    label += "_noalign";
  return label;
}

MetricsReport evaluate_run(const std::filesystem::path& run_dir, const signalio::EpochStore& store) {
  const json cfg = io::read_json(run_dir / "config.json");
  MetricsReport r;
  try {
    r.variant = run_label(cfg);
    r.store_hash = cfg.at("store").at("hash").get<std::string>();
    r.best_epoch = cfg.at("best_epoch").get<int>();
  } catch (const json::exception& e) {
    throw DataError("run config " + (run_dir / "config.json").string() + ": " + e.what());
  }
  if (r.store_hash != store.hash())
    throw DataError("run " + run_dir.string() + " was trained on store " + r.store_hash + ", not " + store.hash());
  auto loaded = model::load_checkpoint(run_dir / "best.ckpt");
  auto& net = loaded.network;
  if (net.num_sources() != store.num_sources()) throw DataError("checkpoint source count does not match the store");
  for (int k = 0; k < store.num_sources(); ++k) {
    const auto& shape = net.config().sources[static_cast<std::size_t>(k)];
    const auto& info = store.sources()[static_cast<std::size_t>(k)];
    if (shape.channels != info.channels || shape.length != static_cast<int>(info.window_samples))
      throw DataError("checkpoint input shape does not match source " + info.name);
  }
  const int batch = cfg.at("train").at("batch_size").get<int>();
  const int min_batch = cfg.at("train").at("eval_min_batch").get<int>();
  ProbeConfig probe;
  if (cfg.contains("probe"))
    probe = probe_config_from_json(cfg.at("probe"));
  else
    probe.seed = cfg.at("train").at("seed").get<std::uint64_t>();

  r.task = task_accuracy(net, store, batch, min_batch);
  const auto latents = extract_representations(net, store, signalio::Split::kTest, batch, min_batch);
  r.probe = domain_probe(latents, store.num_sources(), probe);
  r.chance_task = 1.0 / signalio::kNumEmotions;
  r.chance_domain = 1.0 / store.num_sources();
  return r;
}

std::vector<MetricsReport> order_reports(std::vector<MetricsReport> reports) {
  static const std::vector<std::string> kOrder = {"local", "global", "dann", "dape", "adape"};
  auto rank = [](const std::string& v) {
    const auto it = std::find(kOrder.begin(), kOrder.end(), v);
    return static_cast<std::size_t>(it - kOrder.begin());
  };
  std::stable_sort(reports.begin(), reports.end(),
                   [&](const MetricsReport& a, const MetricsReport& b) { return rank(a.variant) < rank(b.variant); });
  return reports;
}

std::string make_table_csv(std::vector<MetricsReport> reports) {
  if (reports.empty()) throw DataError("report: no runs given");
  for (const auto& r : reports)
    if (r.store_hash != reports.front().store_hash)
      throw DataError("report: runs were evaluated on different stores");
  const std::size_t m = reports.front().task.acc_per_source.size();
  for (const auto& r : reports)
    if (r.task.acc_per_source.size() != m) throw DataError("report: runs disagree on source count");
  reports = order_reports(std::move(reports));

  std::string out = "variant";
  for (std::size_t k = 1; k <= m; ++k) out += ",acc_src_" + std::to_string(k);
  out += ",acc_macro,acc_pooled,probe_acc\n";
  for (const auto& r : reports) {
    out += r.variant;
    double macro = 0.0;
    for (double a : r.task.acc_per_source) {
      out += "," + fixed6(a);
      macro += a / static_cast<double>(m);
    }
    out += "," + fixed6(macro) + "," + fixed6(r.task.acc_pooled) + "," + fixed6(r.probe.accuracy) + "\n";
  }
  return out;
}

}  // namespace dape::eval
