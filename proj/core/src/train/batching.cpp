#include "dape/train/batching.hpp"

#include "dape/error.hpp"
#include "dape/model/loss.hpp"
#include "dape/random.hpp"

namespace dape::train {

SourceBatch assemble_batch(const signalio::EpochStore& store, int source, std::span<const std::size_t> indices) {
  const auto& info = store.sources().at(static_cast<std::size_t>(source));
  const auto len = static_cast<Eigen::Index>(info.window_samples);
  SourceBatch b;
  b.source = source;
  b.batch = static_cast<int>(indices.size());
  b.x.resize(info.channels, b.batch * len);
  b.labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& w = store.windows().at(indices[i]);
    if (w.source_id != source) throw DataError("assemble_batch: window from another source");
    for (int c = 0; c < info.channels; ++c) {
      const float* src = w.x.data() + static_cast<std::size_t>(c) * info.window_samples;
      double* dst = b.x.row(c).data() + static_cast<Eigen::Index>(i) * len;
      for (Eigen::Index t = 0; t < len; ++t) dst[t] = src[t];
    }
    b.labels.push_back(static_cast<int>(w.y));
  }
  return b;
}

std::vector<std::pair<std::size_t, std::size_t>> eval_chunks(std::size_t n, int batch_size, int min_batch) {
  if (batch_size < 1) throw ConfigError("eval_chunks: batch size must be positive");
  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  const auto b = static_cast<std::size_t>(batch_size);
  for (std::size_t start = 0; start < n; start += b) chunks.emplace_back(start, std::min(b, n - start));
  if (chunks.size() > 1 && chunks.back().second < static_cast<std::size_t>(min_batch)) {
    chunks[chunks.size() - 2].second += chunks.back().second;
    chunks.pop_back();
  }
  return chunks;
}

std::vector<std::size_t> eval_order(std::size_t n, int source) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(kEvalOrderSeed, "eval.order", static_cast<std::uint64_t>(source)));
  rng.shuffle(order);
  return order;
}

EvalOutput evaluate_source(model::Network& net, const signalio::EpochStore& store, int source,
                           std::span<const std::size_t> indices, int batch_size, int min_batch) {
  const auto n = static_cast<Eigen::Index>(indices.size());
  EvalOutput out;
  out.latents.resize(n, net.n_z());
  out.logits.resize(n, net.config().num_classes);
  out.labels.resize(indices.size());
  const auto order = eval_order(indices.size(), source);
  std::vector<std::size_t> chunk;
  for (const auto& [start, count] : eval_chunks(indices.size(), batch_size, min_batch)) {
    chunk.clear();
    for (std::size_t i = start; i < start + count; ++i) chunk.push_back(indices[order[i]]);
    const SourceBatch b = assemble_batch(store, source, chunk);
    const Mat z = net.encode(source, b.x, b.batch, model::Mode::kEval, nullptr);
    const Mat logits = net.classify(source, z, nullptr);
    for (std::size_t i = 0; i < count; ++i) {
      const auto row = static_cast<Eigen::Index>(order[start + i]);
      out.latents.row(row) = z.row(static_cast<Eigen::Index>(i));
      out.logits.row(row) = logits.row(static_cast<Eigen::Index>(i));
      out.labels[order[start + i]] = b.labels[i];
    }
  }
  return out;
}

double accuracy(const Mat& logits, std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  const auto pred = model::argmax_rows(logits);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += pred[i] == labels[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace dape::train
