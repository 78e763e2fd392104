#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dape/linalg.hpp"
#include "dape/model/network.hpp"
#include "dape/signalio/epoch_store.hpp"

namespace dape::train {

// One source's mini-batch in encoder layout.
struct SourceBatch {
  int source = 0;
  int batch = 0;
  Mat x;                        // channels x batch*length
  std::vector<int> labels;      // class per sample
  std::vector<double> weights;  // optional per-sample loss weights
};

SourceBatch assemble_batch(const signalio::EpochStore& store, int source, std::span<const std::size_t> indices);

// Consecutive chunks of `batch_size`; a trailing chunk shorter than
// `min_batch` is merged into the previous one.
inline constexpr std::uint64_t kEvalOrderSeed = 0x5eed0fda7aULL;
std::vector<std::size_t> eval_order(std::size_t n, int source);

std::vector<std::pair<std::size_t, std::size_t>> eval_chunks(std::size_t n, int batch_size, int min_batch = 8);

struct EvalOutput {
  Mat latents;              // rows follow `indices`
  Mat logits;
  std::vector<int> labels;
};

// Eval-mode forward of the given windows of one source. Windows are
// visited in a fixed seeded permutation (storage order groups classes
// together) and cut with eval_chunks; the batching matters when batch
// statistics are used. Output rows follow `indices`.
EvalOutput evaluate_source(model::Network& net, const signalio::EpochStore& store, int source,
                           std::span<const std::size_t> indices, int batch_size, int min_batch = 8);

// Fraction of correct argmax predictions.
double accuracy(const Mat& logits, std::span<const int> labels);

}  // namespace dape::train
