#include "dape/model/checkpoint.hpp"

#include <cstring>
#include <map>

#include "dape/error.hpp"
#include "dape/io.hpp"

namespace dape::model {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'D', 'A', 'P', 'E', 'C', 'K', 'P', 'T'};
constexpr int kFormatVersion = 1;

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Network& net, const json& meta) {
  json tensors = json::array();
  std::vector<std::uint8_t> blobs;
  net.visit(ConstParamVisitor([&](const Param& p) {
    tensors.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}, {"offset", blobs.size()}});
    io::append_f64_le(blobs, std::span<const double>(p.value.data(), static_cast<std::size_t>(p.value.size())));
  }));
  const json header = {{"format_version", kFormatVersion},
                       {"network", to_json(net.config())},
                       {"meta", meta},
                       {"tensors", tensors}};
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  const std::uint64_t len = text.size();
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(len >> (8 * b)));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), blobs.begin(), blobs.end());
  io::atomic_write(path, out);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = io::read_bytes(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw DataError(path.string() + ": not a checkpoint file");
  }
  std::uint64_t len = 0;
  for (int b = 0; b < 8; ++b) len |= static_cast<std::uint64_t>(bytes[8 + static_cast<std::size_t>(b)]) << (8 * b);
  if (16 + len > bytes.size()) throw DataError(path.string() + ": truncated header");
  json header;
  try {
    header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(len));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": bad header: " + e.what());
  }
  if (header.value("format_version", 0) != kFormatVersion) {
    throw DataError(path.string() + ": unsupported checkpoint format version");
  }
  const std::size_t blob_start = 16 + len;

  LoadedCheckpoint out{Network(network_config_from_json(header.at("network"))), header.value("meta", json::object())};
  std::map<std::string, json> index;
  for (const auto& t : header.at("tensors")) index[t.at("name").get<std::string>()] = t;

  std::size_t matched = 0;
  out.network.visit(ParamVisitor([&](Param& p) {
    const auto it = index.find(p.name);
    if (it == index.end()) throw DataError(path.string() + ": missing tensor " + p.name);
    const auto rows = it->second.at("rows").get<Eigen::Index>();
    const auto cols = it->second.at("cols").get<Eigen::Index>();
    if (rows != p.value.rows() || cols != p.value.cols()) {
      throw DataError(path.string() + ": shape mismatch for tensor " + p.name);
    }
    const std::size_t offset = blob_start + it->second.at("offset").get<std::size_t>();
    const std::size_t n = static_cast<std::size_t>(rows * cols) * sizeof(double);
    if (offset + n > bytes.size()) throw DataError(path.string() + ": truncated tensor " + p.name);
    const auto values = io::decode_f64_le(std::span<const std::uint8_t>(bytes.data() + offset, n));
    std::copy(values.begin(), values.end(), p.value.data());
    ++matched;
  }));
  if (matched != index.size()) throw DataError(path.string() + ": checkpoint holds unexpected tensors");
  return out;
}

}  // namespace dape::model
