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

#include "tokenlink/wire.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tokenlink/bytes.hpp"
#include "tokenlink/protocol.hpp"
#include "tokenlink/text_codec.hpp"
#include "tokenlink/token_file.hpp"

namespace tokenlink {
namespace {

Message sample_message() {
  Message m;
  m.header = {Task::kInpaint, Direction::kUplink};
  m.frames.push_back({PayloadKind::kMaskBits, WireModel::kRawBits, 8, 2, Bytes{0xB0}});
  m.frames.push_back({PayloadKind::kImageUnmasked, WireModel::kMasked, 5, 16, Bytes{1, 2, 3, 4, 5}});
  m.frames.push_back({PayloadKind::kText, WireModel::kByteCompressor, 3, 32, Bytes{9, 9}});
  return m;
}

TEST(Wire, EmptyMessageIsEightBytes) {
  Message m;
  m.header = {Task::kVqa, Direction::kDownlink};
  const Bytes b = write_message(m);
  EXPECT_EQ(b, (Bytes{'U', 'M', 'I', 'C', 1, 3, 1, 0}));
  EXPECT_EQ(read_message(b), m);
}

TEST(Wire, FrameLayoutIsLittleEndianWithChecksum) {
  Message m;
  m.frames.push_back({PayloadKind::kText, WireModel::kByteCompressor, 0x01020304, 0x0A0B0C0D, Bytes{0xAA}});
  const Bytes b = write_message(m);
  ASSERT_EQ(b.size(), kMessageHeaderSize + kFrameHeaderSize + 1);
  const Bytes frame(b.begin() + 8, b.end());
  const std::uint32_t crc = crc32c(Bytes{0xAA});
  EXPECT_EQ(frame, (Bytes{0, 4, 0x04, 0x03, 0x02, 0x01, 0x0D, 0x0C, 0x0B, 0x0A, 1, 0, 0, 0,
                          static_cast<std::uint8_t>(crc), static_cast<std::uint8_t>(crc >> 8),
                          static_cast<std::uint8_t>(crc >> 16), static_cast<std::uint8_t>(crc >> 24), 0xAA}));
}

TEST(Wire, RoundTripAndSize) {
  const Message m = sample_message();
  const Bytes b = write_message(m);
  EXPECT_EQ(b.size(), message_size(m));
  EXPECT_EQ(b.size(), 8u + (18 + 1) + (18 + 5) + (18 + 2));
  EXPECT_EQ(read_message(b), m);
}

TEST(Wire, IllegalCombinations) {
  for (int kind = 0; kind <= 4; ++kind) {
    for (int model = 0; model <= 5; ++model) {
      const auto k = static_cast<PayloadKind>(kind);
      const auto w = static_cast<WireModel>(model);
      const bool text = k == PayloadKind::kText || k == PayloadKind::kAnswerText;
      const bool expected = text ? w == WireModel::kByteCompressor
                            : k == PayloadKind::kMaskBits ? w == WireModel::kRawBits
                            : k == PayloadKind::kImageUnmasked
                                ? (w == WireModel::kUniform || w == WireModel::kMasked)
                                : (w == WireModel::kUniform || w == WireModel::kAutoregressive ||
                                   w == WireModel::kTextConditional);
      EXPECT_EQ(is_legal_frame(k, w), expected) << kind << "," << model;
    }
  }
  Message m;
  m.frames.push_back({PayloadKind::kImageFull, WireModel::kByteCompressor, 1, 16, Bytes{1}});
  EXPECT_TOKENLINK_ERROR(write_message(m), ErrorCode::kIllegalFrameCombination);
}

TEST(Wire, PlanStepsAreAllLegal) {
  for (Task t : {Task::kTextToImage, Task::kInpaint, Task::kOutpaint, Task::kVqa}) {
    const TransmissionPlan p = plan_for_task(t);
    for (const PlanStep& s : p.uplink) EXPECT_TRUE(is_legal_frame(s.kind, s.model));
    for (const PlanStep& s : p.downlink) EXPECT_TRUE(is_legal_frame(s.kind, s.model));
  }
}

TEST(Wire, HeaderErrors) {
  const Bytes good = write_message(sample_message());
  Bytes b = good;
  b[0] = 'X';
  EXPECT_TOKENLINK_ERROR(read_message(b), ErrorCode::kBadMagic);
  b = good;
  b[4] = 2;
  EXPECT_TOKENLINK_ERROR(read_message(b), ErrorCode::kUnsupportedVersion);
  b = good;
  b[5] = 4;
  EXPECT_TOKENLINK_ERROR(read_message(b), ErrorCode::kUnknownTask);
  b = good;
  b[6] = 2;
  EXPECT_TOKENLINK_ERROR(read_message(b), ErrorCode::kIllegalFrameCombination);
}

TEST(Wire, FrameErrors) {
  const Bytes good = write_message(sample_message());
  Bytes b = good;
  b[8] = 5;  // unknown kind
  EXPECT_TOKENLINK_ERROR(read_message(b), ErrorCode::kIllegalFrameCombination);
  b = good;
  b[9] = 6;  // unknown model
  EXPECT_TOKENLINK_ERROR(read_message(b), ErrorCode::kIllegalFrameCombination);
  b = good;
  b[9] = 4;  // mask bits coded by the byte compressor
  EXPECT_TOKENLINK_ERROR(read_message(b), ErrorCode::kIllegalFrameCombination);
  b = good;
  b[26] ^= 0xFF;  // first payload byte
  EXPECT_TOKENLINK_ERROR(read_message(b), ErrorCode::kChecksumMismatch);
  b = good;
  b.push_back(0);
  EXPECT_TOKENLINK_ERROR(read_message(b), ErrorCode::kCorruptPayload);
  for (std::size_t cut = 0; cut < good.size(); ++cut) {
    const ByteView prefix(good.data(), cut);
    try {
      read_message(prefix);
      ADD_FAILURE() << "prefix of " << cut << " bytes parsed";
    } catch (const Error& e) {
      if (cut >= 4) {
        EXPECT_EQ(e.code(), ErrorCode::kTruncated) << cut;
      }
    }
  }
}

TEST(Wire, FuzzedInputsReturnStructuredErrors) {
  std::mt19937_64 rng(99);
  const Bytes seed_message = write_message(sample_message());
  std::size_t parsed = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    Bytes b;
    if (trial % 2 == 0) {
      b = seed_message;
      const std::size_t flips = 1 + uniform_below(rng, 4);
      for (std::size_t k = 0; k < flips; ++k) b[uniform_below(rng, b.size())] = static_cast<std::uint8_t>(rng());
      if (uniform_below(rng, 4) == 0) b.resize(uniform_below(rng, b.size() + 1));
    } else {
      b.resize(uniform_below(rng, 96));
      for (auto& x : b) x = static_cast<std::uint8_t>(rng());
      if (b.size() >= 8 && uniform_below(rng, 2)) {
        const Bytes head{'U', 'M', 'I', 'C', 1};
        std::copy(head.begin(), head.end(), b.begin());
      }
    }
    try {
      const Message m = read_message(b);
      EXPECT_EQ(write_message(m), b);
      ++parsed;
    } catch (const Error&) {
    }
  }
  EXPECT_GT(parsed, 0u);
}

TEST(WireGolden, MessagesReserializeByteExactly) {
  for (const char* task : {"t2i", "inpaint", "outpaint", "vqa"}) {
    for (const char* dir : {"up", "down"}) {
      const Bytes b = read_file(testing::fixtures() / "golden" / (std::string(task) + "_" + dir + ".umic"));
      const Message m = read_message(b);
      EXPECT_EQ(m.header.task, parse_task(task));
      EXPECT_EQ(m.header.direction, std::string(dir) == "up" ? Direction::kUplink : Direction::kDownlink);
      EXPECT_EQ(write_message(m), b) << task << " " << dir;
    }
  }
}

TEST(WireGolden, TextToImageUplinkCarriesThePrompt) {
  const Message m = read_message(read_file(testing::fixtures() / "golden" / "t2i_up.umic"));
  ASSERT_EQ(m.frames.size(), 1u);
  const PayloadFrame& f = m.frames[0];
  EXPECT_EQ(f.kind, PayloadKind::kText);
  EXPECT_EQ(f.model, WireModel::kByteCompressor);
  const TokenSequence text = load_tokens(testing::fixtures() / "golden" / "t2i_text.umtk", Modality::kText);
  EXPECT_EQ(f.token_count, text.size());
  EXPECT_EQ(f.vocab_size, text.vocab().size());
  EXPECT_EQ(decompress_text_tokens(TextPayload{f.token_count, f.bytes}, text.vocab()), text);
}

TEST(Wire, TaskNames) {
  EXPECT_EQ(parse_task("t2i"), Task::kTextToImage);
  EXPECT_EQ(parse_task("inpaint"), Task::kInpaint);
  EXPECT_EQ(parse_task("outpaint"), Task::kOutpaint);
  EXPECT_EQ(parse_task("vqa"), Task::kVqa);
  EXPECT_TOKENLINK_ERROR(parse_task("caption"), ErrorCode::kUnknownTask);
  for (Task t : {Task::kTextToImage, Task::kInpaint, Task::kOutpaint, Task::kVqa}) {
    EXPECT_EQ(parse_task(task_name(t)), t);
  }
}

}  // namespace
}  // namespace tokenlink
