#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dape/signalio/types.hpp"

namespace dape::signalio {

struct KMeansResult {
  Eigen::MatrixXd centroids;      // k x d
  std::vector<int> assignment;    // cluster index per point
  int iterations = 0;
  bool converged = false;         // assignments stopped changing
};

// Lloyd's algorithm with k-means++ seeding. Stops when assignments are
// unchanged between iterations or after `max_iterations`. Requires at least
// k distinct rows in `points` (n x d).
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iterations = 300);

// Canonical emotion prototypes in min-max normalised valence/arousal space.
struct EmotionPrototype {
  Emotion4 emotion;
  double valence;
  double arousal;
};
inline constexpr EmotionPrototype kEmotionPrototypes[4] = {
    {Emotion4::kFear, 0.0, 1.0},
    {Emotion4::kSad, 0.0, 0.0},
    {Emotion4::kNeutral, 0.5, 0.5},
    {Emotion4::kHappy, 1.0, 1.0},
};

// Names k-means clusters of valence/arousal ratings. The four centroids are
// min-max normalised with the data's per-axis range and matched one-to-one
// to the prototypes, minimising the summed squared centroid-prototype
// distance (each centroid gets its nearest prototype whenever those are
// distinct). Every point receives its cluster's emotion.
std::vector<Emotion4> harmonize_labels(const std::vector<ValenceArousal>& ratings, std::uint64_t seed, int k = 4);

Emotion merge_to_three(Emotion4 label);

// Maps each recording's raw label into the three-class space: discrete3
// passes through, discrete4 is merged, valence/arousal is clustered first.
std::vector<Emotion> harmonize_recordings(const std::vector<Recording>& recordings, LabelMode mode,
                                          std::uint64_t seed);

}  // namespace dape::signalio
