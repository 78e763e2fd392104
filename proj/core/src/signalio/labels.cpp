#include "dape/signalio/labels.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <variant>

#include "dape/error.hpp"
#include "dape/random.hpp"

namespace dape::signalio {

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iterations) {
  if (k < 1) throw ConfigError("kmeans: k must be positive");
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  {
    std::set<std::vector<double>> distinct;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<double> row(static_cast<std::size_t>(d));
      for (Eigen::Index j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = points(i, j);
      distinct.insert(std::move(row));
    }
    if (distinct.size() < static_cast<std::size_t>(k)) {
      throw DataError("kmeans: need at least " + std::to_string(k) + " distinct points, got " +
                      std::to_string(distinct.size()));
    }
  }

  Rng rng(seed);
  KMeansResult res;
  res.centroids.resize(k, d);

  // k-means++ seeding.
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  Eigen::Index first = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  res.centroids.row(0) = points.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dist = (points.row(i) - res.centroids.row(c - 1)).squaredNorm();
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], dist);
      total += d2[static_cast<std::size_t>(i)];
    }
    double target = rng.uniform() * total;
    Eigen::Index chosen = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = d2[static_cast<std::size_t>(i)];
      if (w <= 0.0) continue;
      chosen = i;
      if (target < w) break;
      target -= w;
    }
    res.centroids.row(c) = points.row(chosen);
  }

  res.assignment.assign(static_cast<std::size_t>(n), -1);
  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dist = (points.row(i) - res.centroids.row(c)).squaredNorm();
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      if (res.assignment[static_cast<std::size_t>(i)] != best) {
        res.assignment[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) {
      res.converged = true;
      break;
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = res.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      // An emptied cluster keeps its previous centroid.
      if (counts[static_cast<std::size_t>(c)] > 0) {
        res.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
  }
  return res;
}

std::vector<Emotion4> harmonize_labels(const std::vector<ValenceArousal>& ratings, std::uint64_t seed, int k) {
  if (k != 4) throw ConfigError("harmonize_labels: the emotion prototypes require k = 4");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(ratings.size()), 2);
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    pts(static_cast<Eigen::Index>(i), 0) = ratings[i].valence;
    pts(static_cast<Eigen::Index>(i), 1) = ratings[i].arousal;
  }
  const KMeansResult km = kmeans(pts, k, seed);

  const Eigen::RowVector2d lo = pts.colwise().minCoeff();
  const Eigen::RowVector2d hi = pts.colwise().maxCoeff();
  Eigen::MatrixXd norm(k, 2);
  for (int c = 0; c < k; ++c) {
    for (int a = 0; a < 2; ++a) {
      const double range = hi(a) - lo(a);
      norm(c, a) = range > 0.0 ? (km.centroids(c, a) - lo(a)) / range : 0.5;
    }
  }

  // Brute force over the 4! bijections between clusters and prototypes.
  std::array<int, 4> perm = {0, 1, 2, 3};
  std::array<int, 4> best_perm = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int c = 0; c < 4; ++c) {
      const auto& p = kEmotionPrototypes[perm[static_cast<std::size_t>(c)]];
      const double dv = norm(c, 0) - p.valence;
      const double da = norm(c, 1) - p.arousal;
      cost += dv * dv + da * da;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<Emotion4> out(ratings.size());
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    out[i] = kEmotionPrototypes[best_perm[static_cast<std::size_t>(km.assignment[i])]].emotion;
  }
  return out;
}

Emotion merge_to_three(Emotion4 label) {
  switch (label) {
    case Emotion4::kFear:
    case Emotion4::kSad: return Emotion::kNegative;
    case Emotion4::kNeutral: return Emotion::kNeutral;
    case Emotion4::kHappy: return Emotion::kPositive;
  }
  return Emotion::kNeutral;
}

namespace {

template <typename T>
const T& label_as(const Recording& r, LabelMode mode) {
  if (const T* v = std::get_if<T>(&r.raw_label)) return *v;
  throw DataError("recording '" + r.id + "' has a label that does not match label_mode " +
                  std::string(to_string(mode)));
}

}  // namespace

std::vector<Emotion> harmonize_recordings(const std::vector<Recording>& recordings, LabelMode mode,
                                          std::uint64_t seed) {
  std::vector<Emotion> out;
  out.reserve(recordings.size());
  switch (mode) {
    case LabelMode::kDiscrete3:
      for (const auto& r : recordings) out.push_back(label_as<Emotion>(r, mode));
      break;
    case LabelMode::kDiscrete4:
      for (const auto& r : recordings) out.push_back(merge_to_three(label_as<Emotion4>(r, mode)));
      break;
    case LabelMode::kValenceArousal: {
      std::vector<ValenceArousal> ratings;
      ratings.reserve(recordings.size());
      for (const auto& r : recordings) ratings.push_back(label_as<ValenceArousal>(r, mode));
      for (const Emotion4 e : harmonize_labels(ratings, seed)) out.push_back(merge_to_three(e));
      break;
    }
  }
  return out;
}

}  // namespace dape::signalio
