#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dape/signalio/types.hpp"

namespace dape::signalio {

enum class Split : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2 };
std::string_view to_string(Split s);
Split parse_split(std::string_view s);

struct SourceInfo {
  std::string name;
  int channels = 0;
  double sampling_rate = 0.0;
  std::size_t window_samples = 0;
  LabelMode label_mode = LabelMode::kDiscrete3;
};

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

using ClassCounts = std::array<std::size_t, kNumEmotions>;

// Windows grouped by source and split.
class EpochStore {
 public:
  EpochStore() = default;
  EpochStore(std::vector<SourceInfo> sources, std::vector<Window> windows, std::vector<Split> splits);

  const std::vector<SourceInfo>& sources() const { return sources_; }
  int num_sources() const { return static_cast<int>(sources_.size()); }
  const std::vector<Window>& windows() const { return windows_; }
  const std::vector<Split>& splits() const { return splits_; }
  std::size_t size() const { return windows_.size(); }

  // Indices into windows(), in storage order.
  std::vector<std::size_t> indices(int source, Split split) const;
  ClassCounts class_counts(int source, Split split) const;

  // Throws DataError unless: each source's train split is class-balanced,
  // every (source, class, split) cell is non-empty, and window shapes match
  // their source.
  void validate() const;

  // SHA-256 over the serialised windows and index.
  const std::string& hash() const { return hash_; }

  // windows.f32 (window-major, channel-major within a window) + index.json.
  void save(const std::filesystem::path& dir) const;
  static EpochStore load(const std::filesystem::path& dir);

 private:
  std::vector<std::uint8_t> serialise_windows() const;
  std::string serialise_index_body() const;
  void compute_hash();

  std::vector<SourceInfo> sources_;
  std::vector<Window> windows_;
  std::vector<Split> splits_;
  std::string hash_;
};

// Per source, every class is randomly reduced (without replacement) to the
// smallest per-class count found across ALL sources, so the result is
// balanced within and across sources. Kept windows retain input order.
std::vector<Window> undersample(const std::vector<Window>& windows, int num_sources, std::uint64_t seed);

// Seeded stratified split per (source, class) cell. Cell sizes follow
// largest-remainder rounding of the ratios; ties go to the earlier split.
EpochStore split(std::vector<SourceInfo> sources, const std::vector<Window>& windows, std::uint64_t seed,
                 SplitRatios ratios = {});

// Largest-remainder apportionment of n items into train/val/test counts.
std::array<std::size_t, 3> split_sizes(std::size_t n, SplitRatios ratios);

}  // namespace dape::signalio
