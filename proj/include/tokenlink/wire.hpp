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

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tokenlink/bytes.hpp"

namespace tokenlink {

enum class Task : std::uint8_t { kTextToImage = 0, kInpaint = 1, kOutpaint = 2, kVqa = 3 };
enum class Direction : std::uint8_t { kUplink = 0, kDownlink = 1 };

enum class PayloadKind : std::uint8_t {
  kText = 0,
  kImageFull = 1,
  kImageUnmasked = 2,
  kMaskBits = 3,
  kAnswerText = 4,
};

enum class WireModel : std::uint8_t {
  kUniform = 0,
  kAutoregressive = 1,
  kMasked = 2,
  kTextConditional = 3,
  kByteCompressor = 4,
  kRawBits = 5,
};

std::string_view task_name(Task task);
/// Accepts "t2i", "inpaint", "outpaint", "vqa"; UnknownTask otherwise.
Task parse_task(std::string_view name);
/// Validates a raw header byte; UnknownTask when out of range.
Task task_from_byte(std::uint8_t value);
std::string_view payload_kind_name(PayloadKind kind);
std::string_view wire_model_name(WireModel model);

inline constexpr std::string_view kMessageMagic = "UMIC";
inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kMessageHeaderSize = 8;
/// kind, entropy_model, token_count, vocab_size, byte_length, crc32c.
inline constexpr std::size_t kFrameHeaderSize = 18;

struct MessageHeader {
  Task task = Task::kTextToImage;
  Direction direction = Direction::kUplink;

  friend bool operator==(const MessageHeader&, const MessageHeader&) = default;
};

struct PayloadFrame {
  PayloadKind kind = PayloadKind::kText;
  WireModel model = WireModel::kUniform;
  std::uint32_t token_count = 0;
  std::uint32_t vocab_size = 0;
  Bytes bytes;

  friend bool operator==(const PayloadFrame&, const PayloadFrame&) = default;
};

struct Message {
  MessageHeader header;
  std::vector<PayloadFrame> frames;

  friend bool operator==(const Message&, const Message&) = default;
};

/// True when some transmission plan may carry `kind` coded with `model`.
/// Image frames may always fall back to uniform coding.
bool is_legal_frame(PayloadKind kind, WireModel model);

/// Serialized size: 8 + sum(18 + byte_length).
std::size_t message_size(const Message& message);

/// Little-endian container. Frame checksums are CRC-32C over the payload.
/// Errors: IllegalFrameCombination, InvalidArgument (over 255 frames).
Bytes write_message(const Message& message);

/// Errors: BadMagic, UnsupportedVersion, UnknownTask, IllegalFrameCombination
/// (also for unknown kind/model/direction bytes), Truncated, ChecksumMismatch,
/// CorruptPayload (trailing bytes).
Message read_message(ByteView bytes);

}  // namespace tokenlink
