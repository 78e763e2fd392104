#include <gtest/gtest.h>

#include <cmath>

#include "dape/eval/metrics.hpp"
#include "dape/signalio/pipeline.hpp"
#include "dape/synthgen/synthgen.hpp"

namespace {

using namespace dape::signalio;

const EpochStore& reference_store() {
  static const EpochStore store = [] {
    const auto data = dape::synthgen::generate(dape::synthgen::reference_sources(), {}, 1);
    return prepare_store(data, {}, 2);
  }();
  return store;
}

TEST(Pipeline, ReferenceStoreShape) {
  const auto& store = reference_store();
  ASSERT_EQ(store.num_sources(), 3);
  // 180 trials x floor(10 s / 2 s) windows, balanced by construction.
  EXPECT_EQ(store.size(), 2700u);
  const std::size_t len[] = {256, 400, 256};
  for (int s = 0; s < 3; ++s) {
    EXPECT_EQ(store.sources()[static_cast<std::size_t>(s)].window_samples, len[s]);
    EXPECT_EQ(store.class_counts(s, Split::kTrain), (ClassCounts{180, 180, 180}));
    EXPECT_EQ(store.class_counts(s, Split::kVal), (ClassCounts{60, 60, 60}));
    EXPECT_EQ(store.class_counts(s, Split::kTest), (ClassCounts{60, 60, 60}));
  }
}

TEST(Pipeline, WindowClassMatchesRecordingLabel) {
  const auto& store = reference_store();
  for (const auto& w : store.windows()) {
    if (w.source_id != 1) continue;
    const std::string tag(to_string(w.y));
    EXPECT_NE(w.recording_id.find(tag), std::string::npos) << w.recording_id;
  }
}

TEST(Pipeline, SourcesAreDistinguishableInRawStatistics) {
  // The synthetic domain shift must be real: per-window log-variance and
  // mean absolute value alone identify the source.
  const auto& store = reference_store();
  dape::eval::LatentTable t;
  t.z.resize(static_cast<Eigen::Index>(store.size()), 2);
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& w = store.windows()[i];
    double s = 0.0, s2 = 0.0, sa = 0.0;
    for (float v : w.x) {
      s += v;
      s2 += static_cast<double>(v) * v;
      sa += std::abs(v);
    }
    const double n = static_cast<double>(w.x.size());
    t.z(static_cast<Eigen::Index>(i), 0) = std::log(s2 / n - (s / n) * (s / n));
    t.z(static_cast<Eigen::Index>(i), 1) = sa / n;
    t.source.push_back(w.source_id);
    t.label.push_back(static_cast<int>(w.y));
  }
  const auto r = dape::eval::domain_probe(t, 3, {});
  EXPECT_GT(r.accuracy, 0.9);
}

TEST(Pipeline, PrepareIsDeterministic) {
  const auto data = dape::synthgen::generate(dape::synthgen::reference_sources(), {}, 1);
  EXPECT_EQ(prepare_store(data, {}, 2).hash(), reference_store().hash());
}

}  // namespace
