#include <gtest/gtest.h>

#include "dape/error.hpp"
#include "dape/random.hpp"
#include "dape/signalio/labels.hpp"

namespace {

using namespace dape::signalio;

std::vector<ValenceArousal> clustered_ratings(std::uint64_t seed, int per_cluster) {
  // Anchors on a 1..9 scale: fear (2, 8), sad (2, 2), neutral (5, 5), happy (8, 8).
  const ValenceArousal anchors[] = {{2, 8}, {2, 2}, {5, 5}, {8, 8}};
  dape::Rng rng(seed);
  std::vector<ValenceArousal> out;
  for (int i = 0; i < per_cluster; ++i)
    for (const auto& a : anchors) out.push_back({a.valence + 0.3 * rng.normal(), a.arousal + 0.3 * rng.normal()});
  return out;
}

TEST(Labels, KMeansSeparatesClusters) {
  const auto r = clustered_ratings(1, 20);
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(r.size()), 2);
  for (std::size_t i = 0; i < r.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) << r[i].valence, r[i].arousal;
  const auto km = kmeans(pts, 4, 7);
  EXPECT_TRUE(km.converged);
  for (std::size_t i = 4; i < r.size(); ++i) EXPECT_EQ(km.assignment[i], km.assignment[i % 4]);
}

TEST(Labels, KMeansIsSeedDeterministic) {
  const auto r = clustered_ratings(2, 10);
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(r.size()), 2);
  for (std::size_t i = 0; i < r.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) << r[i].valence, r[i].arousal;
  const auto a = kmeans(pts, 4, 3);
  const auto b = kmeans(pts, 4, 3);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.centroids, b.centroids);
}

TEST(Labels, KMeansNeedsDistinctPoints) {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Ones(10, 2);
  pts(0, 0) = 2.0;
  EXPECT_THROW(kmeans(pts, 4, 1), dape::DataError);
}

TEST(Labels, HarmonizeNamesPrototypes) {
  const auto r = clustered_ratings(3, 15);
  const auto labels = harmonize_labels(r, 11);
  const Emotion4 expected[] = {Emotion4::kFear, Emotion4::kSad, Emotion4::kNeutral, Emotion4::kHappy};
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(labels[i], expected[i % 4]) << i;
}

TEST(Labels, MergeToThree) {
  EXPECT_EQ(merge_to_three(Emotion4::kFear), Emotion::kNegative);
  EXPECT_EQ(merge_to_three(Emotion4::kSad), Emotion::kNegative);
  EXPECT_EQ(merge_to_three(Emotion4::kNeutral), Emotion::kNeutral);
  EXPECT_EQ(merge_to_three(Emotion4::kHappy), Emotion::kPositive);
}

TEST(Labels, HarmonizeRecordingsByMode) {
  std::vector<Recording> recs(2);
  recs[0].raw_label = Emotion4::kSad;
  recs[1].raw_label = Emotion4::kHappy;
  const auto out = harmonize_recordings(recs, LabelMode::kDiscrete4, 0);
  EXPECT_EQ(out, (std::vector<Emotion>{Emotion::kNegative, Emotion::kPositive}));
  EXPECT_THROW(harmonize_recordings(recs, LabelMode::kDiscrete3, 0), dape::DataError);
}

}  // namespace
