#include <gtest/gtest.h>

#include "dape/error.hpp"
#include "dape/eval/metrics.hpp"
#include "dape/signalio/pipeline.hpp"
#include "dape/synthgen/synthgen.hpp"
#include "dape/train/trainer.hpp"
#include "test_support.hpp"

namespace {

using namespace dape;
using namespace dape::eval;

LatentTable gaussian_table(int sources, int per_source, int dim, std::uint64_t seed) {
  Rng rng(seed);
  LatentTable t;
  t.z = dape::testing::random_mat(sources * per_source, dim, rng);
  for (int k = 0; k < sources; ++k)
    for (int i = 0; i < per_source; ++i) t.source.push_back(k);
  t.label.assign(t.source.size(), 0);
  return t;
}

TEST(DomainProbe, OneHotLatentsAreFullyIdentifiable) {
  LatentTable t = gaussian_table(3, 50, 3, 1);
  t.z.setZero();
  for (std::size_t i = 0; i < t.source.size(); ++i) t.z(static_cast<Eigen::Index>(i), t.source[i]) = 1.0;
  const auto r = domain_probe(t, 3, {});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.n_train, 120u);
  EXPECT_EQ(r.n_test, 30u);
}

TEST(DomainProbe, IdenticalDistributionsGiveChance) {
  const auto t = gaussian_table(4, 1000, 8, 2);
  const auto r = domain_probe(t, 4, {});
  EXPECT_NEAR(r.accuracy, 0.25, 0.05);
}

TEST(DomainProbe, InvariantToRowPermutationWithinSource) {
  LatentTable t = gaussian_table(3, 60, 4, 3);
  for (std::size_t i = 0; i < t.source.size(); ++i) t.z(static_cast<Eigen::Index>(i), 0) += 0.8 * t.source[i];
  ProbeConfig cfg;
  cfg.seed = 77;
  const auto a = domain_probe(t, 3, cfg);
  // Sources stored interleaved instead of grouped; each source's rows keep
  // their relative order, so the probe splits are the same sets.
  LatentTable u;
  u.z.resize(t.z.rows(), t.z.cols());
  for (int i = 0; i < 60; ++i)
    for (int k = 0; k < 3; ++k) {
      u.z.row(i * 3 + k) = t.z.row(k * 60 + i);
      u.source.push_back(k);
    }
  u.label.assign(u.source.size(), 0);
  EXPECT_EQ(domain_probe(u, 3, cfg).accuracy, a.accuracy);
  EXPECT_GT(a.accuracy, 0.6);
}

TEST(DomainProbe, ShuffledSourceIdsFallToChance) {
  LatentTable t = gaussian_table(3, 300, 4, 4);
  for (std::size_t i = 0; i < t.source.size(); ++i) t.z(static_cast<Eigen::Index>(i), t.source[i]) += 3.0;
  EXPECT_GT(domain_probe(t, 3, {}).accuracy, 0.9);
  Rng rng(9);
  rng.shuffle(t.source);
  EXPECT_NEAR(domain_probe(t, 3, {}).accuracy, 1.0 / 3.0, 0.07);
}

TEST(DomainProbe, RejectsMissingSource) {
  const auto t = gaussian_table(2, 10, 2, 5);
  EXPECT_THROW(domain_probe(t, 3, {}), DataError);
}

MetricsReport report(const std::string& variant, std::vector<double> acc, double probe, const std::string& hash = "h") {
  MetricsReport r;
  r.variant = variant;
  r.store_hash = hash;
  r.task.acc_per_source = std::move(acc);
  r.task.acc_pooled = 0.5;
  r.probe.accuracy = probe;
  return r;
}

TEST(Table, FixedRowOrderAndFormat) {
  const std::string csv = make_table_csv({report("adape", {1.0, 0.5}, 0.4), report("dape_noalign", {1, 1}, 0.9),
                                          report("local", {0.25, 0.75}, 0.99), report("dape", {0, 1}, 0.5)});
  EXPECT_EQ(csv,
            "variant,acc_src_1,acc_src_2,acc_macro,acc_pooled,probe_acc\n"
            "local,0.250000,0.750000,0.500000,0.500000,0.990000\n"
            "dape,0.000000,1.000000,0.500000,0.500000,0.500000\n"
            "adape,1.000000,0.500000,0.750000,0.500000,0.400000\n"
            "dape_noalign,1.000000,1.000000,1.000000,0.500000,0.900000\n");
}

TEST(Table, MixedStoresRejected) {
  EXPECT_THROW(make_table_csv({report("local", {1}, 1, "a"), report("dape", {1}, 1, "b")}), DataError);
  EXPECT_THROW(make_table_csv({}), DataError);
}

TEST(Table, RunLabel) {
  nlohmann::json cfg = {{"variant", "adape"}, {"train", {{"align", false}}}};
  EXPECT_EQ(run_label(cfg), "adape_noalign");
  cfg["train"]["align"] = true;
  EXPECT_EQ(run_label(cfg), "adape");
}

TEST(TaskAccuracy, ConstantClassifierScoresOneThird) {
  std::vector<synthgen::SynthSourceSpec> specs(2);
  specs[0].name = "a";
  specs[1].name = "b";
  specs[1].channels = 5;
  for (auto& s : specs) {
    s.trials_per_class = 10;
    s.trial_seconds = 7.0;
  }
  const auto store = signalio::prepare_store(synthgen::generate(specs, {}, 1), {}, 2);
  model::EncoderConfig enc;
  enc.n_z = 4;
  enc.filters = {2, 2, 4};
  enc.kernel_length = 5;
  model::Network net(train::network_config_for(store, model::Variant::kDape, enc, {}, 3));
  net.visit(model::ParamVisitor([](model::Param& p) {
    if (p.name == "classifier.out.weight") p.value.setZero();
    if (p.name == "classifier.out.bias") p.value << 0.0, 1.0, 0.0;
  }));
  const auto m = task_accuracy(net, store, 8, 8);
  ASSERT_EQ(m.acc_per_source.size(), 2u);
  for (double a : m.acc_per_source) EXPECT_DOUBLE_EQ(a, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.acc_macro, 1.0 / 3.0);
  EXPECT_EQ(m.n_per_source[0], 12u);
}

TEST(ProbeConfigJson, RoundTripAndValidation) {
  ProbeConfig c;
  c.train_fraction = 0.7;
  c.seed = 123;
  const auto back = probe_config_from_json(to_json(c));
  EXPECT_EQ(back.train_fraction, 0.7);
  EXPECT_EQ(back.seed, 123u);
  c.train_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
