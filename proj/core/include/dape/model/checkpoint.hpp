#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "dape/model/network.hpp"

namespace dape::model {

// Binary container:
//   8 bytes   magic "DAPECKPT"
//   8 bytes   little-endian u64 header length H
//   H bytes   JSON header: {"format_version", "network", "meta",
//             "tensors": [{"name", "rows", "cols", "offset"}]}
//   blobs     little-endian float64 tensor data, row-major, at the given
//             byte offsets relative to the end of the header
// `meta` carries caller data (experiment config, epoch, rng state).
void save_checkpoint(const std::filesystem::path& path, const Network& net, const nlohmann::json& meta);

struct LoadedCheckpoint {
  Network network;
  nlohmann::json meta;
};
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dape::model
