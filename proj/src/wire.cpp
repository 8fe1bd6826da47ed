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

#include <algorithm>
#include <string>

namespace tokenlink {

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kTextToImage: return "t2i";
    case Task::kInpaint: return "inpaint";
    case Task::kOutpaint: return "outpaint";
    case Task::kVqa: return "vqa";
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  for (std::uint8_t v = 0; v < 4; ++v) {
    if (task_name(static_cast<Task>(v)) == name) return static_cast<Task>(v);
  }
  fail(ErrorCode::kUnknownTask, "unknown task '" + std::string(name) + "'");
}

Task task_from_byte(std::uint8_t value) {
  if (value > 3) fail(ErrorCode::kUnknownTask, "task byte " + std::to_string(value));
  return static_cast<Task>(value);
}

std::string_view payload_kind_name(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kText: return "text-tokens";
    case PayloadKind::kImageFull: return "image-tokens-full";
    case PayloadKind::kImageUnmasked: return "image-tokens-unmasked";
    case PayloadKind::kMaskBits: return "mask-bits";
    case PayloadKind::kAnswerText: return "answer-text-tokens";
  }
  return "unknown";
}

std::string_view wire_model_name(WireModel model) {
  switch (model) {
    case WireModel::kUniform: return "uniform";
    case WireModel::kAutoregressive: return "autoregressive";
    case WireModel::kMasked: return "masked";
    case WireModel::kTextConditional: return "text-conditional";
    case WireModel::kByteCompressor: return "byte-compressor";
    case WireModel::kRawBits: return "raw-bits";
  }
  return "unknown";
}

bool is_legal_frame(PayloadKind kind, WireModel model) {
  switch (kind) {
    case PayloadKind::kText:
    case PayloadKind::kAnswerText:
      return model == WireModel::kByteCompressor;
    case PayloadKind::kImageFull:
      return model == WireModel::kUniform || model == WireModel::kAutoregressive ||
             model == WireModel::kTextConditional;
    case PayloadKind::kImageUnmasked:
      return model == WireModel::kUniform || model == WireModel::kMasked;
    case PayloadKind::kMaskBits:
      return model == WireModel::kRawBits;
  }
  return false;
}

std::size_t message_size(const Message& message) {
  std::size_t total = kMessageHeaderSize;
  for (const PayloadFrame& f : message.frames) total += kFrameHeaderSize + f.bytes.size();
  return total;
}

Bytes write_message(const Message& message) {
  if (message.frames.size() > 255) {
    fail(ErrorCode::kInvalidArgument, "a message holds at most 255 frames");
  }
  ByteWriter w;
  w.raw(kMessageMagic);
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(message.header.task));
  w.u8(static_cast<std::uint8_t>(message.header.direction));
  w.u8(static_cast<std::uint8_t>(message.frames.size()));
  for (const PayloadFrame& f : message.frames) {
    if (!is_legal_frame(f.kind, f.model)) {
      fail(ErrorCode::kIllegalFrameCombination,
           std::string(payload_kind_name(f.kind)) + " cannot be coded " +
               std::string(wire_model_name(f.model)));
    }
    if (f.bytes.size() > 0xFFFFFFFFu) fail(ErrorCode::kInvalidArgument, "frame too large");
    w.u8(static_cast<std::uint8_t>(f.kind));
    w.u8(static_cast<std::uint8_t>(f.model));
    w.u32(f.token_count);
    w.u32(f.vocab_size);
    w.u32(static_cast<std::uint32_t>(f.bytes.size()));
    w.u32(crc32c(f.bytes));
    w.raw(f.bytes);
  }
  return std::move(w).take();
}

Message read_message(ByteView bytes) {
  ByteReader r(bytes);
  const ByteView magic = r.raw(kMessageMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMessageMagic.begin())) {
    fail(ErrorCode::kBadMagic, "not a UMIC message");
  }
  const std::uint8_t version = r.u8();
  if (version != kWireVersion) {
    fail(ErrorCode::kUnsupportedVersion, "message version " + std::to_string(version));
  }
  Message m;
  m.header.task = task_from_byte(r.u8());
  const std::uint8_t direction = r.u8();
  if (direction > 1) {
    fail(ErrorCode::kIllegalFrameCombination, "direction byte " + std::to_string(direction));
  }
  m.header.direction = static_cast<Direction>(direction);
  const std::uint8_t count = r.u8();
  m.frames.reserve(count);
  for (std::uint8_t i = 0; i < count; ++i) {
    PayloadFrame f;
    const std::uint8_t kind = r.u8();
    const std::uint8_t model = r.u8();
    if (kind > 4 || model > 5 ||
        !is_legal_frame(static_cast<PayloadKind>(kind), static_cast<WireModel>(model))) {
      fail(ErrorCode::kIllegalFrameCombination, "frame " + std::to_string(i) + ": kind " +
                                                    std::to_string(kind) + ", model " +
                                                    std::to_string(model));
    }
    f.kind = static_cast<PayloadKind>(kind);
    f.model = static_cast<WireModel>(model);
    f.token_count = r.u32();
    f.vocab_size = r.u32();
    const std::uint32_t length = r.u32();
    const std::uint32_t checksum = r.u32();
    const ByteView payload = r.raw(length);
    if (crc32c(payload) != checksum) {
      fail(ErrorCode::kChecksumMismatch, "frame " + std::to_string(i) + " checksum");
    }
    f.bytes.assign(payload.begin(), payload.end());
    m.frames.push_back(std::move(f));
  }
  if (!r.at_end()) fail(ErrorCode::kCorruptPayload, "trailing bytes after last frame");
  return m;
}

}  // namespace tokenlink
