#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dape/error.hpp"
#include "dape/io.hpp"
#include "test_support.hpp"

namespace {

namespace io = dape::io;

TEST(Io, F32LittleEndianLayout) {
  std::vector<std::uint8_t> bytes;
  const std::vector<float> v = {1.0f, -2.5f};
  io::append_f32_le(bytes, v);
  ASSERT_EQ(bytes.size(), 8u);
  // 1.0f = 0x3F800000
  EXPECT_EQ(bytes[0], 0x00);
  EXPECT_EQ(bytes[3], 0x3F);
  EXPECT_EQ(io::decode_f32_le(bytes), v);
}

TEST(Io, F64RoundTripKeepsBits) {
  const std::vector<double> v = {0.1, -1e300, std::numeric_limits<double>::denorm_min(), 0.0};
  std::vector<std::uint8_t> bytes;
  io::append_f64_le(bytes, v);
  EXPECT_EQ(io::decode_f64_le(bytes), v);
}

TEST(Io, Sha256KnownVector) {
  EXPECT_EQ(io::sha256_hex(std::string_view("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Io, AtomicWriteReplacesFile) {
  const auto dir = dape::testing::scratch_dir("io");
  io::atomic_write(dir / "a.txt", std::string_view("first"));
  io::atomic_write(dir / "a.txt", std::string_view("second"));
  EXPECT_EQ(io::read_text(dir / "a.txt"), "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
}

TEST(Io, ReadMissingFileIsDataError) {
  EXPECT_THROW(io::read_text("/nonexistent/dape/file"), dape::DataError);
}

}  // namespace
