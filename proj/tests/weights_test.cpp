// Copyright 2026 The tokenlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tokenlink/weights.hpp"

#include <gtest/gtest.h>

#include <cstring>

#include "test_support.hpp"
#include "tokenlink/bytes.hpp"

namespace tokenlink {
namespace {

using testing::TempDir;

/// Rewrites the trailing CRC so a deliberate edit reaches the field checks.
void reseal(Bytes& file) {
  const std::uint32_t crc = crc32c(ByteView(file.data(), file.size() - 4));
  for (int i = 0; i < 4; ++i) file[file.size() - 4 + i] = static_cast<std::uint8_t>(crc >> (8 * i));
}

TEST(Crc32c, CheckValue) {
  const std::string s = "123456789";
  EXPECT_EQ(crc32c(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())), 0xE3069283u);
}

TEST(Weights, SaveLoadRoundTrip) {
  TempDir dir("weights");
  for (ModelMode mode : {ModelMode::kAutoregressive, ModelMode::kMasked, ModelMode::kTextConditional}) {
    const EntropyModelWeights w = EntropyModelWeights::random(mode, 12, 20, 42);
    save_weights(w, dir / "w.umew");
    EXPECT_EQ(load_weights(dir / "w.umew"), w);
  }
}

TEST(Weights, FixtureFilesReserializeByteExactly) {
  for (const char* name : {"w_ar.umew", "w_masked.umew", "w_textcond.umew"}) {
    const Bytes file = read_file(testing::fixtures() / "weights" / name);
    EXPECT_EQ(serialize_weights(parse_weights(file)), file) << name;
  }
}

TEST(Weights, FixtureModes) {
  EXPECT_EQ(testing::fixture_suite().autoregressive->mode(), ModelMode::kAutoregressive);
  EXPECT_EQ(testing::fixture_suite().masked->mode(), ModelMode::kMasked);
  EXPECT_EQ(testing::fixture_suite().text_conditional->mode(), ModelMode::kTextConditional);
}

TEST(Weights, CorruptedByteFailsTheChecksum) {
  Bytes file = serialize_weights(EntropyModelWeights::random(ModelMode::kAutoregressive, 8, 0, 1));
  file[file.size() / 2] ^= 0x01;
  EXPECT_TOKENLINK_ERROR(parse_weights(file), ErrorCode::kChecksumMismatch);
}

TEST(Weights, UnsupportedArchitecture) {
  Bytes file = serialize_weights(EntropyModelWeights::random(ModelMode::kAutoregressive, 8, 0, 1));
  // d_model follows magic, version and mode.
  ASSERT_EQ(file[6], 64);
  file[6] = 65;
  reseal(file);
  EXPECT_TOKENLINK_ERROR(parse_weights(file), ErrorCode::kUnsupportedVersion);
}

TEST(Weights, UnsupportedVersionAndMode) {
  const Bytes good = serialize_weights(EntropyModelWeights::random(ModelMode::kMasked, 8, 0, 1));
  Bytes version = good;
  version[4] = 2;
  reseal(version);
  EXPECT_TOKENLINK_ERROR(parse_weights(version), ErrorCode::kUnsupportedVersion);
  Bytes mode = good;
  mode[5] = 7;
  reseal(mode);
  EXPECT_TOKENLINK_ERROR(parse_weights(mode), ErrorCode::kUnsupportedVersion);
}

TEST(Weights, BadMagicAndTruncation) {
  Bytes file = serialize_weights(EntropyModelWeights::random(ModelMode::kAutoregressive, 8, 0, 1));
  Bytes magic = file;
  magic[0] = 'X';
  EXPECT_TOKENLINK_ERROR(parse_weights(magic), ErrorCode::kBadMagic);
  EXPECT_TOKENLINK_ERROR(parse_weights(ByteView(file.data(), 5)), ErrorCode::kTruncated);
  // A truncated body with a valid CRC still fails structurally.
  Bytes cut(file.begin(), file.begin() + static_cast<std::ptrdiff_t>(file.size() / 2));
  cut.resize(cut.size() + 4);
  reseal(cut);
  try {
    parse_weights(cut);
    FAIL() << "parsed a truncated body";
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::kTruncated || e.code() == ErrorCode::kShapeMismatch) << e.what();
  }
}

TEST(Weights, ShapeMismatch) {
  auto tensors = EntropyModelWeights::random(ModelMode::kAutoregressive, 8, 0, 1).tensors();
  tensors.back().second.dims = {9};
  tensors.back().second.data.resize(9);
  EXPECT_TOKENLINK_ERROR(EntropyModelWeights(ModelMode::kAutoregressive, 8, 0, tensors), ErrorCode::kShapeMismatch);
  tensors.pop_back();
  EXPECT_TOKENLINK_ERROR(EntropyModelWeights(ModelMode::kAutoregressive, 8, 0, tensors), ErrorCode::kShapeMismatch);
}

TEST(Weights, MissingFileIsAnIoError) {
  EXPECT_TOKENLINK_ERROR(load_weights("/nonexistent/tokenlink/w.umew"), ErrorCode::kIoError);
}

}  // namespace
}  // namespace tokenlink
