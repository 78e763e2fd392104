#include "dape/train/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

#include "dape/error.hpp"
#include "dape/io.hpp"
#include "dape/model/checkpoint.hpp"
#include "dape/model/loss.hpp"
#include "dape/random.hpp"
#include "dape/version.hpp"

namespace dape::train {
namespace {

using json = nlohmann::json;
using model::Variant;

bool uses_alignment(Variant v) { return v == Variant::kDape || v == Variant::kAdape; }

// Runs fn(k) for k in [0, n) on up to `threads` workers. Each k must touch
// disjoint state.
void for_each_source(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int k = w; k < n; k += workers) {
        try {
          fn(k);
        } catch (...) {
          errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 2) throw ConfigError("train.batch_size must be >= 2");
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (threads < 1) throw ConfigError("train.threads must be >= 1");
  if (eval_min_batch < 1) throw ConfigError("train.eval_min_batch must be >= 1");
  adam.validate();
  bandwidths.validate();
  kappa.validate();
}

json to_json(const TrainConfig& c) {
  return {{"variant", model::to_string(c.variant)},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"optimizer",
           {{"learning_rate", c.adam.learning_rate},
            {"beta1", c.adam.beta1},
            {"beta2", c.adam.beta2},
            {"eps", c.adam.eps}}},
          {"seed", c.seed},
          {"bandwidths", c.bandwidths.sigma},
          {"kappa", {{"start_epoch", c.kappa.start_epoch}, {"rate", c.kappa.rate}, {"cap", c.kappa.cap}}},
          {"align", c.align},
          {"threads", c.threads},
          {"eval_min_batch", c.eval_min_batch}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  try {
    c.variant = model::parse_variant(j.at("variant").get<std::string>());
    c.batch_size = j.at("batch_size").get<int>();
    c.epochs = j.at("epochs").get<int>();
    const auto& o = j.at("optimizer");
    c.adam.learning_rate = o.at("learning_rate").get<double>();
    c.adam.beta1 = o.at("beta1").get<double>();
    c.adam.beta2 = o.at("beta2").get<double>();
    c.adam.eps = o.at("eps").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.bandwidths.sigma = j.at("bandwidths").get<std::vector<double>>();
    const auto& k = j.at("kappa");
    c.kappa.start_epoch = k.at("start_epoch").get<int>();
    c.kappa.rate = k.at("rate").get<double>();
    c.kappa.cap = k.at("cap").get<double>();
    c.align = j.at("align").get<bool>();
    c.threads = j.at("threads").get<int>();
    c.eval_min_batch = j.at("eval_min_batch").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

model::NetworkConfig network_config_for(const signalio::EpochStore& store, Variant variant,
                                        const model::EncoderConfig& encoder,
                                        const std::vector<int>& classifier_hidden, std::uint64_t seed) {
  model::NetworkConfig cfg;
  cfg.variant = variant;
  cfg.encoder = encoder;
  cfg.classifier_hidden = classifier_hidden;
  cfg.num_classes = signalio::kNumEmotions;
  cfg.seed = seed;
  for (const auto& s : store.sources())
    cfg.sources.push_back({s.channels, static_cast<int>(s.window_samples)});
  return cfg;
}

StepStats compute_gradients(model::Network& net, const std::vector<SourceBatch>& batches, const StepWeights& w,
                            const mmd::PairSample& pairs, const mmd::Bandwidths& bandwidths, int threads) {
  const int m = net.num_sources();
  if (static_cast<int>(batches.size()) != m) throw DataError("compute_gradients: one batch per source required");
  const Variant variant = net.variant();
  const auto um = static_cast<std::size_t>(m);

  net.zero_grad();
  std::vector<Mat> z(um);
  std::vector<model::SourceTrace> traces(um);
  std::vector<Mat> dz(um);

  // Private encoders own disjoint parameters, so their passes may run in
  // parallel; a shared encoder accumulates into one set and stays serial.
  const int workers = net.shared_encoder() ? 1 : threads;
  for_each_source(m, workers, [&](int k) {
    const auto& b = batches[static_cast<std::size_t>(k)];
    z[static_cast<std::size_t>(k)] =
        net.encode(k, b.x, b.batch, model::Mode::kTrain, &traces[static_cast<std::size_t>(k)]);
  });

  std::size_t total = 0;
  for (const auto& b : batches) total += static_cast<std::size_t>(b.batch);

  StepStats stats;
  stats.correct.assign(um, 0);
  stats.seen.assign(um, 0);
  for (int k = 0; k < m; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto& b = batches[uk];
    model::ClassifierTrace ctrace;
    const Mat logits = net.classify(k, z[uk], &ctrace);
    auto lg = model::cross_entropy(logits, b.labels, b.weights);
    // Local sums independent per-source means; the others average the
    // stacked batch.
    const double scale =
        variant == Variant::kLocal ? 1.0 : static_cast<double>(b.batch) / static_cast<double>(total);
    stats.l_ce += variant == Variant::kLocal ? lg.loss / m : scale * lg.loss;
    dz[uk] = net.classifier_for(k).backward(ctrace, lg.grad * scale);
    const auto pred = model::argmax_rows(logits);
    for (std::size_t i = 0; i < pred.size(); ++i) stats.correct[uk] += pred[i] == b.labels[i] ? 1 : 0;
    stats.seen[uk] += pred.size();
  }

  if (uses_alignment(variant) && m >= 2) {
    const auto ag = mmd::alignment_loss_grad(z, bandwidths, pairs);
    stats.l_da = ag.loss;
    if (w.align && w.kappa != 0.0)
      for (std::size_t k = 0; k < um; ++k) dz[k] += w.kappa * ag.grads[k];
  } else if (variant == Variant::kDann) {
    auto* head = net.domain_head();
    for (int k = 0; k < m; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      model::ClassifierTrace htrace;
      const Mat logits = head->forward(model::grad_reverse_forward(z[uk]), &htrace);
      const std::vector<int> ids(static_cast<std::size_t>(batches[uk].batch), k);
      auto lg = model::cross_entropy(logits, ids);
      const double scale = static_cast<double>(batches[uk].batch) / static_cast<double>(total);
      stats.l_da += scale * lg.loss;
      const Mat dhead = head->backward(htrace, lg.grad * scale);
      dz[uk] += model::grad_reverse_backward(dhead, w.lambda);
    }
  }

  const double effective_kappa = (uses_alignment(variant) && w.align) ? w.kappa : 0.0;
  const double loss = stats.l_ce + (variant == Variant::kDann ? stats.l_da : effective_kappa * stats.l_da);
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite training loss (l_ce=" << stats.l_ce << ", l_da=" << stats.l_da << ")";
    throw DivergenceError(msg.str());
  }

  for_each_source(m, workers, [&](int k) {
    const auto uk = static_cast<std::size_t>(k);
    net.encode_backward(k, batches[uk].x, traces[uk], dz[uk], nullptr);
  });
  return stats;
}

std::vector<double> validation_accuracy(model::Network& net, const signalio::EpochStore& store,
                                        signalio::Split split, int batch_size, int min_batch) {
  std::vector<double> acc;
  for (int k = 0; k < store.num_sources(); ++k) {
    const auto idx = store.indices(k, split);
    const auto out = evaluate_source(net, store, k, idx, batch_size, min_batch);
    acc.push_back(accuracy(out.logits, out.labels));
  }
  return acc;
}

RunArtifacts fit(const TrainConfig& cfg, const model::NetworkConfig& net_cfg, const signalio::EpochStore& store) {
  cfg.validate();
  net_cfg.validate();
  if (net_cfg.variant != cfg.variant) throw ConfigError("fit: network and train config disagree on variant");
  if (static_cast<int>(net_cfg.sources.size()) != store.num_sources())
    throw ConfigError("fit: network source count does not match the store");

  const int m = store.num_sources();
  const auto um = static_cast<std::size_t>(m);
  const auto bsz = static_cast<std::size_t>(cfg.batch_size);
  std::vector<std::vector<std::size_t>> order(um);
  std::size_t steps = 0;
  for (int k = 0; k < m; ++k) {
    order[static_cast<std::size_t>(k)] = store.indices(k, signalio::Split::kTrain);
    for (auto s : {signalio::Split::kVal})
      if (store.indices(k, s).empty())
        throw DataError("fit: empty " + std::string(signalio::to_string(s)) + " split for source " +
                        store.sources()[static_cast<std::size_t>(k)].name);
    const std::size_t n = order[static_cast<std::size_t>(k)].size() / bsz;
    if (n == 0)
      throw DataError("fit: train split of source " + store.sources()[static_cast<std::size_t>(k)].name +
                      " is smaller than one batch");
    steps = k == 0 ? n : std::min(steps, n);
  }

  model::Network net(net_cfg);
  Adam opt(cfg.adam);
  std::vector<Rng> shuffle_rng;
  json streams = json::array();
  for (int k = 0; k < m; ++k) {
    const auto seed = derive_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(k));
    shuffle_rng.emplace_back(seed);
    streams.push_back({{"name", "shuffle." + std::to_string(k)}, {"seed", seed}});
  }
  const auto pair_seed = derive_seed(cfg.seed, "pairs", 0);
  Rng pair_rng(pair_seed);
  streams.push_back({{"name", "pairs"}, {"seed", pair_seed}});
  const bool sample = uses_alignment(cfg.variant) && m >= 2;

  RunArtifacts run;
  double best_macro = -1.0;
  std::size_t pair_draws = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochLog entry;
    entry.epoch = epoch;
    entry.kappa = uses_alignment(cfg.variant) && cfg.align ? kappa(epoch, cfg.kappa) : 0.0;
    entry.lambda = cfg.variant == Variant::kDann
                       ? dann_lambda(static_cast<double>(epoch) / static_cast<double>(cfg.epochs))
                       : 0.0;
    const StepWeights weights{entry.kappa, entry.lambda, cfg.align};
    for (std::size_t k = 0; k < um; ++k) shuffle_rng[k].shuffle(order[k]);

    std::vector<std::size_t> correct(um, 0), seen(um, 0);
    for (std::size_t s = 0; s < steps; ++s) {
      std::vector<SourceBatch> batches;
      batches.reserve(um);
      for (int k = 0; k < m; ++k) {
        const std::span<const std::size_t> idx(order[static_cast<std::size_t>(k)].data() + s * bsz, bsz);
        batches.push_back(assemble_batch(store, k, idx));
      }
      mmd::PairSample pairs;
      if (sample) {
        pairs = mmd::sample_pairs(m, pair_rng);
        ++pair_draws;
      }
      StepStats st;
      try {
        st = compute_gradients(net, batches, weights, pairs, cfg.bandwidths, cfg.threads);
      } catch (const DivergenceError& e) {
        throw DivergenceError(std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", step " +
                              std::to_string(s + 1));
      }
      opt.step(net);
      entry.l_ce += st.l_ce;
      entry.l_da += st.l_da;
      for (std::size_t k = 0; k < um; ++k) {
        correct[k] += st.correct[k];
        seen[k] += st.seen[k];
      }
    }
    entry.l_ce /= static_cast<double>(steps);
    entry.l_da /= static_cast<double>(steps);
    for (std::size_t k = 0; k < um; ++k)
      entry.train_acc_macro += static_cast<double>(correct[k]) / static_cast<double>(seen[k]) / m;

    entry.val_acc = validation_accuracy(net, store, signalio::Split::kVal, cfg.batch_size, cfg.eval_min_batch);
    for (double a : entry.val_acc) entry.val_acc_macro += a / m;
    // Ties go to the later epoch.
    if (entry.val_acc_macro >= best_macro) {
      best_macro = entry.val_acc_macro;
      run.best = net;
      run.best_epoch = epoch;
    }
    run.log.push_back(std::move(entry));
  }
  run.final = std::move(net);

  for (std::size_t k = 0; k < um; ++k) streams[k]["final_state_sha256"] = io::sha256_hex(shuffle_rng[k].state());
  streams[um]["final_state_sha256"] = io::sha256_hex(pair_rng.state());
  run.rng_trace = {{"schema_version", kSchemaVersion},
                   {"seed", cfg.seed},
                   {"network_seed", net_cfg.seed},
                   {"streams", std::move(streams)},
                   {"pair_draws", pair_draws},
                   {"steps_per_epoch", steps}};
  return run;
}

RunArtifacts fit_baseline(Variant kind, const TrainConfig& cfg, const model::NetworkConfig& net_cfg,
                          const signalio::EpochStore& store) {
  if (kind != Variant::kLocal && kind != Variant::kGlobal && kind != Variant::kDann)
    throw ConfigError("fit_baseline: " + std::string(model::to_string(kind)) + " is not a baseline");
  if (cfg.variant != kind) throw ConfigError("fit_baseline: train config variant mismatch");
  return fit(cfg, net_cfg, store);
}

std::string log_csv(const std::vector<EpochLog>& log, int num_sources) {
  std::string out = "epoch,l_ce,l_da,kappa,lambda";
  for (int k = 1; k <= num_sources; ++k) out += ",val_acc_src_" + std::to_string(k);
  out += ",val_acc_macro,train_acc_macro\n";
  for (const auto& e : log) {
    out += std::to_string(e.epoch) + "," + fmt_double(e.l_ce) + "," + fmt_double(e.l_da) + "," +
           fmt_double(e.kappa) + "," + fmt_double(e.lambda);
    for (double a : e.val_acc) out += "," + fmt_double(a);
    out += "," + fmt_double(e.val_acc_macro) + "," + fmt_double(e.train_acc_macro) + "\n";
  }
  return out;
}

void save_run(const std::filesystem::path& dir, const RunArtifacts& run, const TrainConfig& cfg,
              const model::NetworkConfig& net_cfg, const RunInfo& info) {
  std::filesystem::create_directories(dir);
  const int m = static_cast<int>(net_cfg.sources.size());
  io::atomic_write(dir / "log.csv", log_csv(run.log, m));
  const auto& best = run.log.at(static_cast<std::size_t>(run.best_epoch - 1));
  model::save_checkpoint(dir / "best.ckpt", run.best,
                         {{"epoch", run.best_epoch}, {"val_acc_macro", best.val_acc_macro}, {"kind", "best"}});
  model::save_checkpoint(dir / "final.ckpt", run.final,
                         {{"epoch", static_cast<int>(run.log.size())},
                          {"val_acc_macro", run.log.back().val_acc_macro},
                          {"kind", "final"}});
  json config = {{"schema_version", kSchemaVersion},
                 {"variant", model::to_string(cfg.variant)},
                 {"train", to_json(cfg)},
                 {"network", model::to_json(net_cfg)},
                 {"store", {{"path", info.store_path}, {"hash", info.store_hash}}},
                 {"best_epoch", run.best_epoch},
                 {"epochs_completed", run.log.size()}};
  if (!info.probe.is_null()) config["probe"] = info.probe;
  io::atomic_write_json(dir / "config.json", config);
  io::atomic_write_json(dir / "rng.json", run.rng_trace);
}

}  // namespace dape::train
