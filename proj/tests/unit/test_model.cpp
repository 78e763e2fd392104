#include <gtest/gtest.h>

#include <map>
#include <set>

#include "dape/error.hpp"
#include "dape/io.hpp"
#include "dape/mmd/mmd.hpp"
#include "dape/model/checkpoint.hpp"
#include "dape/model/loss.hpp"
#include "dape/model/network.hpp"
#include "dape/train/trainer.hpp"
#include "test_support.hpp"

namespace {

using namespace dape;
using namespace dape::model;
using dape::testing::random_mat;
using dape::testing::relative_error;

constexpr int kBatch = 4;
constexpr int kLength = 32;

std::vector<train::SourceBatch> tiny_batches(int sources, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<train::SourceBatch> out;
  for (int k = 0; k < sources; ++k) {
    train::SourceBatch b;
    b.source = k;
    b.batch = kBatch;
    b.x = random_mat(3, kBatch * kLength, rng);
    b.labels = {0, 1, 2, static_cast<int>(rng.uniform_index(3))};
    out.push_back(b);
  }
  return out;
}

// Forward-only reference objective assembled from public pieces:
//   stacked CE (or per-source sum for local) + kappa * alignment
//   + domain_sign * domain CE.
// For dann the encoder sees (CE - lambda * domain CE) while the heads see
// (CE + domain CE); `domain_sign` picks which one is evaluated.
double objective(Network& net, const std::vector<train::SourceBatch>& batches, double kappa,
                 const mmd::PairSample& pairs, const mmd::Bandwidths& bw, double domain_sign) {
  std::vector<Mat> z;
  double ce = 0.0, dom = 0.0;
  const double total = static_cast<double>(kBatch * batches.size());
  for (const auto& b : batches) {
    z.push_back(net.encode(b.source, b.x, b.batch, Mode::kTrain, nullptr));
    const Mat logits = net.classify(b.source, z.back(), nullptr);
    const double l = cross_entropy(logits, b.labels).loss;
    ce += net.variant() == Variant::kLocal ? l : l * b.batch / total;
    if (net.variant() == Variant::kDann) {
      const std::vector<int> ids(static_cast<std::size_t>(b.batch), b.source);
      dom += cross_entropy(net.domain_head()->forward(z.back(), nullptr), ids).loss * b.batch / total;
    }
  }
  double da = 0.0;
  if (net.variant() == Variant::kDape || net.variant() == Variant::kAdape) da = mmd::alignment_loss(z, bw, pairs);
  return ce + kappa * da + domain_sign * dom;
}

// Compares compute_gradients with central differences over every trainable
// tensor. The error is measured over the concatenated parameter vector:
// tensors in front of a batch norm (conv biases) have an exactly zero true
// gradient, which a per-tensor ratio would turn into pure round-off.
// Returns the error and the tensor holding the largest absolute deviation.
std::pair<double, std::string> gradient_check(Variant variant, double kappa, double lambda,
                                              const mmd::Bandwidths& bw) {
  Network net(dape::testing::tiny_network_config(variant));
  const auto batches = tiny_batches(2, 99);
  const mmd::PairSample pairs{{{0, 1}, {0, 1}}};
  train::compute_gradients(net, batches, {kappa, lambda, true}, pairs, bw);

  std::map<std::string, Mat> analytic;
  std::vector<Param*> params;
  net.visit(ParamVisitor([&](Param& p) {
    if (!p.trainable) return;
    analytic[p.name] = p.grad;
    params.push_back(&p);
  }));
  double max_diff = 0.0, scale = 1e-6;
  std::string where;
  for (Param* p : params) {
    const bool head = p->name.rfind("domain_head", 0) == 0 || p->name.rfind("classifier", 0) == 0;
    const double sign = head ? 1.0 : -lambda;
    const Mat n = dape::testing::numeric_gradient(
        p->value, [&] { return objective(net, batches, kappa, pairs, bw, sign); }, 1e-5);
    const Mat& a = analytic.at(p->name);
    scale = std::max({scale, a.cwiseAbs().maxCoeff(), n.cwiseAbs().maxCoeff()});
    const double diff = (a - n).cwiseAbs().maxCoeff();
    if (diff > max_diff) {
      max_diff = diff;
      where = p->name;
    }
  }
  return {max_diff / scale, where};
}

TEST(ModelGradients, DapeWithAlignment) {
  const auto [err, where] = gradient_check(Variant::kDape, 3.0, 0.0, mmd::Bandwidths{{0.5, 1.0, 2.0}});
  EXPECT_LE(err, 1e-4) << where;
}

TEST(ModelGradients, DapeReferenceBandwidths) {
  const auto [err, where] = gradient_check(Variant::kDape, 16.25, 0.0, mmd::Bandwidths{});
  EXPECT_LE(err, 1e-4) << where;
}

TEST(ModelGradients, Local) {
  const auto [err, where] = gradient_check(Variant::kLocal, 0.0, 0.0, mmd::Bandwidths{});
  EXPECT_LE(err, 1e-4) << where;
}

TEST(ModelGradients, Global) {
  const auto [err, where] = gradient_check(Variant::kGlobal, 0.0, 0.0, mmd::Bandwidths{});
  EXPECT_LE(err, 1e-4) << where;
}

TEST(ModelGradients, DannWithReversal) {
  const auto [err, where] = gradient_check(Variant::kDann, 0.0, 0.7, mmd::Bandwidths{});
  EXPECT_LE(err, 1e-4) << where;
}

TEST(ModelGradients, EncoderInputGradient) {
  Network net(dape::testing::tiny_network_config(Variant::kGlobal));
  auto batches = tiny_batches(2, 5);
  auto f = [&] {
    const Mat z = net.encode(0, batches[0].x, kBatch, Mode::kTrain, nullptr);
    return cross_entropy(net.classify(0, z, nullptr), batches[0].labels).loss;
  };
  SourceTrace trace;
  const Mat z = net.encode(0, batches[0].x, kBatch, Mode::kTrain, &trace);
  ClassifierTrace ct;
  const auto lg = cross_entropy(net.classify(0, z, &ct), batches[0].labels);
  net.zero_grad();
  const Mat dz = net.classifier_for(0).backward(ct, lg.grad);
  Mat dx;
  net.encode_backward(0, batches[0].x, trace, dz, &dx);
  EXPECT_LE(relative_error(dx, dape::testing::numeric_gradient(batches[0].x, f, 1e-5)), 1e-4);
}

TEST(Loss, CrossEntropyValueAndGradient) {
  Mat logits(2, 3);
  logits << 1.0, 2.0, 3.0, 0.0, 0.0, 0.0;
  const std::vector<int> y = {2, 1};
  const auto lg = cross_entropy(logits, y);
  const double l0 = -std::log(std::exp(3.0) / (std::exp(1.0) + std::exp(2.0) + std::exp(3.0)));
  EXPECT_NEAR(lg.loss, (l0 + std::log(3.0)) / 2.0, 1e-14);
  const Mat n = dape::testing::numeric_gradient(logits, [&] { return cross_entropy(logits, y).loss; });
  EXPECT_LT(relative_error(lg.grad, n), 1e-8);
}

TEST(Loss, WeightsKeepMeanOverAllRows) {
  Mat logits(2, 3);
  logits << 1.0, 2.0, 3.0, 0.5, 0.0, -1.0;
  const std::vector<int> y = {2, 1};
  const std::vector<double> w = {1.0, 0.0};
  const auto lg = cross_entropy(logits, y, w);
  EXPECT_NEAR(lg.loss, cross_entropy(logits.topRows(1), std::vector<int>{2}).loss / 2.0, 1e-14);
  EXPECT_EQ(lg.grad.row(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Loss, NonFiniteLogitsDiverge) {
  Mat logits(1, 3);
  logits << 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
  EXPECT_THROW(cross_entropy(logits, std::vector<int>{0}), DivergenceError);
}

TEST(Heads, GradReverse) {
  Mat z(1, 2);
  z << 1.0, -2.0;
  EXPECT_EQ(grad_reverse_forward(z), z);
  EXPECT_EQ(grad_reverse_backward(z, 0.5), -0.5 * z);
}

TEST(Heads, ChannelAdapterStartsAsTruncatedIdentity) {
  ChannelAdapter a("adapter0", 5, 3);
  Rng rng(1);
  const Mat x = random_mat(5, 8, rng);
  EXPECT_EQ(a.forward(x), x.topRows(3));
  EXPECT_THROW(ChannelAdapter("bad", 2, 3), ConfigError);
}

TEST(Network, VariantTopologies) {
  const auto count_prefix = [](const Network& n, const std::string& prefix) {
    std::set<std::string> tensors;
    n.visit(ConstParamVisitor([&](const Param& p) {
      if (p.name.rfind(prefix, 0) == 0) tensors.insert(p.name.substr(0, p.name.find('.')));
    }));
    return tensors.size();
  };
  const Network dape_net(dape::testing::tiny_network_config(Variant::kDape));
  EXPECT_EQ(count_prefix(dape_net, "encoder"), 2u);
  EXPECT_EQ(count_prefix(dape_net, "classifier"), 1u);
  const Network local(dape::testing::tiny_network_config(Variant::kLocal));
  EXPECT_EQ(count_prefix(local, "classifier"), 2u);
  const Network dann(dape::testing::tiny_network_config(Variant::kDann));
  EXPECT_EQ(count_prefix(dann, "encoder"), 1u);
  EXPECT_EQ(count_prefix(dann, "adapter"), 2u);
  EXPECT_EQ(count_prefix(dann, "domain_head"), 1u);
}

TEST(Network, AdapeUsesBatchStatisticsAtInference) {
  Network dape_net(dape::testing::tiny_network_config(Variant::kDape));
  Network adape(dape::testing::tiny_network_config(Variant::kAdape));
  auto batches = tiny_batches(1, 3);
  Mat shifted = batches[0].x.array() + 5.0;
  // Batch statistics remove a constant offset in the first layer; running
  // statistics (still at their initial values) do not.
  const Mat a0 = adape.encode(0, batches[0].x, kBatch, Mode::kEval, nullptr);
  const Mat a1 = adape.encode(0, shifted, kBatch, Mode::kEval, nullptr);
  EXPECT_LT((a0 - a1).cwiseAbs().maxCoeff(), 1e-9);
  const Mat d0 = dape_net.encode(0, batches[0].x, kBatch, Mode::kEval, nullptr);
  const Mat d1 = dape_net.encode(0, shifted, kBatch, Mode::kEval, nullptr);
  EXPECT_GT((d0 - d1).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Network, RejectsDegenerateWindows) {
  auto cfg = dape::testing::tiny_network_config(Variant::kDape);
  cfg.sources[0].length = 10;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Checkpoint, RoundTripPreservesOutputs) {
  const auto dir = dape::testing::scratch_dir("ckpt");
  for (Variant v : {Variant::kDape, Variant::kLocal, Variant::kDann}) {
    Network net(dape::testing::tiny_network_config(v));
    auto batches = tiny_batches(2, 4);
    train::compute_gradients(net, batches, {1.0, 0.5, true}, {{{0, 1}, {0, 1}}}, mmd::Bandwidths{});
    save_checkpoint(dir / "a.ckpt", net, {{"epoch", 7}});
    auto loaded = load_checkpoint(dir / "a.ckpt");
    EXPECT_EQ(loaded.meta.at("epoch"), 7);
    EXPECT_EQ(loaded.network.variant(), v);
    for (int k = 0; k < 2; ++k) {
      const Mat a = net.encode(k, batches[static_cast<std::size_t>(k)].x, kBatch, Mode::kEval, nullptr);
      const Mat b = loaded.network.encode(k, batches[static_cast<std::size_t>(k)].x, kBatch, Mode::kEval, nullptr);
      EXPECT_EQ(a, b);
    }
  }
}

TEST(Checkpoint, CorruptFileIsDataError) {
  const auto dir = dape::testing::scratch_dir("ckpt_bad");
  Network net(dape::testing::tiny_network_config(Variant::kDape));
  save_checkpoint(dir / "a.ckpt", net, {});
  auto bytes = dape::io::read_bytes(dir / "a.ckpt");
  bytes.resize(bytes.size() - 16);
  dape::io::atomic_write(dir / "b.ckpt", bytes);
  EXPECT_THROW(load_checkpoint(dir / "b.ckpt"), DataError);
  bytes[0] = 'X';
  dape::io::atomic_write(dir / "c.ckpt", bytes);
  EXPECT_THROW(load_checkpoint(dir / "c.ckpt"), DataError);
}

}  // namespace
