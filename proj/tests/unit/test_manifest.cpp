#include <gtest/gtest.h>

#include <fstream>

#include "dape/error.hpp"
#include "dape/io.hpp"
#include "dape/signalio/manifest.hpp"
#include "test_support.hpp"

namespace {

using namespace dape::signalio;

Dataset small_dataset() {
  Dataset ds;
  ds.spec = {"demo", 2, 4.0, LabelMode::kValenceArousal, 1.5};
  for (int r = 0; r < 3; ++r) {
    Recording rec;
    rec.id = "rec" + std::to_string(r);
    rec.channels = 2;
    rec.n_samples = 8;
    for (int i = 0; i < 16; ++i) rec.samples.push_back(0.25 * (i + r));
    rec.raw_label = ValenceArousal{1.0 + r, 9.0 - r};
    ds.recordings.push_back(rec);
  }
  return ds;
}

TEST(Manifest, RoundTrip) {
  const auto dir = dape::testing::scratch_dir("manifest_rt");
  const auto ds = small_dataset();
  write_dataset(dir, ds);
  const auto back = load_dataset(dir);
  EXPECT_EQ(back.spec.name, "demo");
  EXPECT_EQ(back.spec.channels, 2);
  EXPECT_DOUBLE_EQ(back.spec.sampling_rate, 4.0);
  EXPECT_EQ(back.spec.label_mode, LabelMode::kValenceArousal);
  EXPECT_DOUBLE_EQ(back.spec.tail_seconds, 1.5);
  ASSERT_EQ(back.recordings.size(), 3u);
  EXPECT_EQ(back.recordings[2].samples, ds.recordings[2].samples);
  EXPECT_EQ(std::get<ValenceArousal>(back.recordings[1].raw_label), (ValenceArousal{2.0, 8.0}));
}

TEST(Manifest, SizeMismatchIsDataError) {
  const auto dir = dape::testing::scratch_dir("manifest_size");
  write_dataset(dir, small_dataset());
  auto j = dape::io::read_json(dir / "manifest.json");
  j["recordings"][0]["n_samples"] = 9;
  dape::io::atomic_write_json(dir / "manifest.json", j);
  EXPECT_THROW(load_dataset(dir), dape::DataError);
}

TEST(Manifest, NonFiniteSampleIsDataError) {
  const auto dir = dape::testing::scratch_dir("manifest_nan");
  auto ds = small_dataset();
  write_dataset(dir, ds);
  std::vector<std::uint8_t> bytes;
  std::vector<float> vals(16, 0.0f);
  vals[5] = std::numeric_limits<float>::quiet_NaN();
  dape::io::append_f32_le(bytes, vals);
  dape::io::atomic_write(dir / "data" / "rec0.f32", bytes);
  EXPECT_THROW(load_dataset(dir), dape::DataError);
}

TEST(Manifest, WrongLabelTypeIsDataError) {
  const auto dir = dape::testing::scratch_dir("manifest_label");
  write_dataset(dir, small_dataset());
  auto j = dape::io::read_json(dir / "manifest.json");
  j["recordings"][1]["label"] = "happy";
  dape::io::atomic_write_json(dir / "manifest.json", j);
  EXPECT_THROW(load_dataset(dir), dape::DataError);
}

TEST(Manifest, UnknownLabelModeFails) {
  const auto dir = dape::testing::scratch_dir("manifest_mode");
  write_dataset(dir, small_dataset());
  auto j = dape::io::read_json(dir / "manifest.json");
  j["label_mode"] = "discrete5";
  dape::io::atomic_write_json(dir / "manifest.json", j);
  EXPECT_THROW(load_dataset(dir), dape::Error);
}

}  // namespace
