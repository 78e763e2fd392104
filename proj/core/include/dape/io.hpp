#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dape::io {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path);
std::vector<std::uint8_t> read_bytes(const fs::path& path);

// Writes to "<path>.tmp.<pid>" and renames over the target.
void atomic_write(const fs::path& path, std::string_view contents);
void atomic_write(const fs::path& path, std::span<const std::uint8_t> bytes);
void atomic_write_json(const fs::path& path, const nlohmann::json& j);

nlohmann::json read_json(const fs::path& path);

// Little-endian float32 encoding, independent of host byte order.
void append_f32_le(std::vector<std::uint8_t>& out, std::span<const float> values);
std::vector<float> decode_f32_le(std::span<const std::uint8_t> bytes);
void append_f64_le(std::vector<std::uint8_t>& out, std::span<const double> values);
std::vector<double> decode_f64_le(std::span<const std::uint8_t> bytes);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

}  // namespace dape::io
