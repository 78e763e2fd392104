#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dape/config/experiment.hpp"
#include "dape/error.hpp"
#include "dape/eval/metrics.hpp"
#include "dape/io.hpp"
#include "dape/signalio/manifest.hpp"
#include "dape/signalio/pipeline.hpp"
#include "dape/synthgen/synthgen.hpp"
#include "dape/train/trainer.hpp"
#include "dape/version.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void print_json(const json& j) { std::cout << j.dump() << "\n"; }

int fail(dape::ExitCode code, std::string_view kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", static_cast<int>(code)}}}}.dump()
            << "\n";
  return static_cast<int>(code);
}

// A dataset directory holds manifest.json; a parent directory holds one
// dataset per subdirectory (taken in name order).
std::vector<fs::path> expand_datasets(const std::vector<std::string>& args) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    const fs::path p(a);
    if (fs::exists(p / "manifest.json")) {
      out.push_back(p);
      continue;
    }
    if (!fs::is_directory(p)) throw dape::DataError("dataset directory not found: " + a);
    std::vector<fs::path> children;
    for (const auto& entry : fs::directory_iterator(p))
      if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) children.push_back(entry.path());
    if (children.empty()) throw dape::DataError("no manifest.json under " + a);
    std::sort(children.begin(), children.end());
    out.insert(out.end(), children.begin(), children.end());
  }
  return out;
}

dape::config::ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  auto cfg = path.empty() ? dape::config::ExperimentConfig{} : dape::config::load_experiment(path);
  if (seed) {
    cfg.seed = *seed;
    cfg.probe.seed = *seed;
  }
  return cfg;
}

dape::signalio::EpochStore load_store(const std::string& path) {
  return dape::signalio::EpochStore::load(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-source representation learning with MMD-aligned private encoders", "dape"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dape 0.1.0 (schema " + std::to_string(dape::kSchemaVersion) + ")");

  std::string config_path, out, store_path, run_dir, variant_name = "dape";
  std::vector<std::string> datasets, runs;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  int threads = 1;
  bool no_align = false;
  std::string report_store;

  auto* synth = app.add_subcommand("synth", "Generate the synthetic multi-source dataset");
  synth->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out, "Output directory; one dataset per source")->required();
  synth->add_option("--seed", seed, "Override the experiment seed");

  auto* prepare = app.add_subcommand("prepare", "Preprocess datasets into a balanced, split epoch store");
  prepare->add_option("--dataset", datasets, "Dataset directory, or a parent of several (repeatable)")
      ->required();
  prepare->add_option("--out", out, "Output store directory")->required();
  prepare->add_option("--config", config_path, "Experiment config supplying preprocess settings and seed")
      ->check(CLI::ExistingFile);
  prepare->add_option("--seed", seed, "Override the experiment seed");

  auto* train = app.add_subcommand("train", "Train one variant on a store");
  train->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  train->add_option("--store", store_path, "Epoch store directory")->required();
  train->add_option("--variant", variant_name, "dape, adape, local, global or dann")
      ->required()
      ->check(CLI::IsMember({"dape", "adape", "local", "global", "dann"}));
  train->add_option("--out", out, "Run directory")->required();
  train->add_option("--epochs", epochs, "Override train.epochs");
  train->add_option("--seed", seed, "Override the experiment seed");
  train->add_option("--threads", threads, "Worker threads for per-source passes (1 is the reference mode)")
      ->check(CLI::PositiveNumber);
  train->add_flag("--no-align", no_align, "Drop the alignment loss (the kappa = 0 ablation)");

  auto* eval = app.add_subcommand("eval", "Task accuracy and domain probe of a run's best checkpoint");
  eval->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--store", store_path, "Epoch store directory")->required();
  eval->add_option("--out", out, "Output metrics JSON")->required();

  auto* probe = app.add_subcommand("probe", "Domain probe on test-set representations of a run");
  probe->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  probe->add_option("--store", store_path, "Epoch store directory")->required();
  probe->add_option("--out", out, "Output probe JSON")->required();

  auto* report = app.add_subcommand("report", "Results table over several runs");
  report->add_option("--runs", runs, "Run directories")->required()->expected(1, -1);
  report->add_option("--out", out, "Output CSV; a JSON twin is written next to it")->required();
  report->add_option("--store", report_store, "Store to evaluate on (default: the one recorded by each run)");

  auto* selftest = app.add_subcommand("selftest", "Closed-form checks of the estimator, schedules and filter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(dape::ExitCode::kConfig, "config_error", e.what());
  }

  try {
    if (*synth) {
      const auto cfg = load_config(config_path, seed);
      if (cfg.sources.empty()) throw dape::ConfigError("config.sources is empty");
      const auto dirs = dape::synthgen::generate_to(out, cfg.sources, cfg.classes, cfg.synth_seed());
      json list = json::array();
      for (const auto& d : dirs) list.push_back(d.string());
      print_json({{"command", "synth"}, {"datasets", list}});
    } else if (*prepare) {
      const auto cfg = load_config(config_path, seed);
      std::vector<dape::signalio::Dataset> loaded;
      for (const auto& d : expand_datasets(datasets)) loaded.push_back(dape::signalio::load_dataset(d));
      const auto store = dape::signalio::prepare_store(loaded, cfg.preprocess, cfg.prepare_seed());
      store.save(out);
      print_json({{"command", "prepare"}, {"store", out}, {"hash", store.hash()}, {"windows", store.size()}});
    } else if (*train) {
      auto cfg = load_config(config_path, seed);
      if (epochs) cfg.train.epochs = *epochs;
      cfg.train.threads = threads;
      if (no_align) cfg.train.align = false;
      cfg.validate();
      const auto store = load_store(store_path);
      const auto variant = dape::model::parse_variant(variant_name);
      const auto tcfg = cfg.train_config(variant);
      const auto ncfg = cfg.network_config(store, variant);
      const auto run = dape::train::fit(tcfg, ncfg, store);
      dape::train::save_run(out, run, tcfg, ncfg,
                            {fs::absolute(store_path).lexically_normal().string(), store.hash(),
                             dape::eval::to_json(cfg.probe)});
      const auto& best = run.log.at(static_cast<std::size_t>(run.best_epoch - 1));
      print_json({{"command", "train"},
                  {"run", out},
                  {"variant", variant_name},
                  {"epochs", run.log.size()},
                  {"best_epoch", run.best_epoch},
                  {"best_val_acc_macro", best.val_acc_macro}});
    } else if (*eval || *probe) {
      const auto store = load_store(store_path);
      const auto r = dape::eval::evaluate_run(run_dir, store);
      if (*eval) {
        dape::io::atomic_write_json(out, dape::eval::to_json(r));
      } else {
        json j = dape::eval::to_json(r.probe);
        j["variant"] = r.variant;
        j["store_hash"] = r.store_hash;
        dape::io::atomic_write_json(out, j);
      }
      print_json({{"command", *eval ? "eval" : "probe"},
                  {"out", out},
                  {"acc_macro", r.task.acc_macro},
                  {"probe_acc", r.probe.accuracy}});
    } else if (*report) {
      std::map<std::string, dape::signalio::EpochStore> stores;
      std::vector<dape::eval::MetricsReport> reports;
      for (const auto& rd : runs) {
        std::string sp = report_store;
        if (sp.empty()) {
          const json rc = dape::io::read_json(fs::path(rd) / "config.json");
          sp = rc.at("store").at("path").get<std::string>();
        }
        if (!stores.count(sp)) stores.emplace(sp, load_store(sp));
        reports.push_back(dape::eval::evaluate_run(rd, stores.at(sp)));
      }
      const std::string csv = dape::eval::make_table_csv(reports);
      dape::io::atomic_write(out, csv);
      json rows = json::array();
      for (const auto& r : dape::eval::order_reports(reports)) rows.push_back(dape::eval::to_json(r));
      fs::path twin(out);
      twin.replace_extension(".json");
      dape::io::atomic_write_json(twin, {{"schema_version", dape::kSchemaVersion},
                                         {"chance_task", reports.front().chance_task},
                                         {"chance_domain", reports.front().chance_domain},
                                         {"rows", rows}});
      print_json({{"command", "report"}, {"csv", out}, {"json", twin.string()}, {"rows", reports.size()}});
    } else if (*selftest) {
      const json r = dape::tools::run_selftest();
      print_json(r);
      if (!r.at("passed").get<bool>())
        return fail(dape::ExitCode::kDivergence, "numeric_divergence", "selftest failed");
    }
  } catch (const dape::Error& e) {
    return fail(e.code(), e.kind(), e.what());
  } catch (const json::exception& e) {
    return fail(dape::ExitCode::kData, "data_error", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(dape::ExitCode::kData, "data_error", e.what());
  } catch (const std::exception& e) {
    return fail(dape::ExitCode::kData, "data_error", e.what());
  }
  return 0;
}
