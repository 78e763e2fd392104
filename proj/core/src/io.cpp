#include "dape/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>
#include <unistd.h>

#include "dape/error.hpp"

namespace dape::io {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> out(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(size))) {
    throw DataError("short read on " + path.string());
  }
  return out;
}

void atomic_write(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void atomic_write(const fs::path& path, std::span<const std::uint8_t> bytes) {
  atomic_write(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void atomic_write_json(const fs::path& path, const nlohmann::json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

namespace {

template <typename Float, typename Bits>
void append_le(std::vector<std::uint8_t>& out, std::span<const Float> values) {
  const std::size_t start = out.size();
  out.resize(start + values.size() * sizeof(Float));
  std::uint8_t* p = out.data() + start;
  for (const Float v : values) {
    const Bits bits = std::bit_cast<Bits>(v);
    for (std::size_t b = 0; b < sizeof(Float); ++b) *p++ = static_cast<std::uint8_t>(bits >> (8 * b));
  }
}

template <typename Float, typename Bits>
std::vector<Float> decode_le(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % sizeof(Float) != 0) throw DataError("byte count is not a multiple of the element size");
  std::vector<Float> out(bytes.size() / sizeof(Float));
  const std::uint8_t* p = bytes.data();
  for (auto& v : out) {
    Bits bits = 0;
    for (std::size_t b = 0; b < sizeof(Float); ++b) bits |= static_cast<Bits>(*p++) << (8 * b);
    v = std::bit_cast<Float>(bits);
  }
  return out;
}

}  // namespace

void append_f32_le(std::vector<std::uint8_t>& out, std::span<const float> values) {
  append_le<float, std::uint32_t>(out, values);
}
std::vector<float> decode_f32_le(std::span<const std::uint8_t> bytes) {
  return decode_le<float, std::uint32_t>(bytes);
}
void append_f64_le(std::vector<std::uint8_t>& out, std::span<const double> values) {
  append_le<double, std::uint64_t>(out, values);
}
std::vector<double> decode_f64_le(std::span<const std::uint8_t> bytes) {
  return decode_le<double, std::uint64_t>(bytes);
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw DataError("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace dape::io
