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

#include "tokenlink/range_coder.hpp"

#include <string>

namespace tokenlink {

namespace {
constexpr std::uint32_t kTop = 1u << 24;
}

void RangeEncoder::encode(const QuantizedCdf& cdf, std::uint32_t symbol) {
  if (finished_) fail(ErrorCode::kStateError, "encode after finish");
  if (symbol >= cdf.alphabet_size()) {
    fail(ErrorCode::kSymbolOutOfRange, "symbol " + std::to_string(symbol) + " for alphabet of " +
                                           std::to_string(cdf.alphabet_size()));
  }
  const std::uint32_t r = range_ >> kCdfPrecisionBits;
  low_ += static_cast<std::uint64_t>(r) * cdf.low(symbol);
  range_ = r * cdf.frequency(symbol);
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t held = cache_;
    do {
      // The very first cached byte is always zero and never carries.
      if (first_byte_) {
        first_byte_ = false;
      } else {
        out_.push_back(static_cast<std::uint8_t>(held + carry));
      }
      held = 0xFF;
    } while (--pending_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++pending_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

Bytes RangeEncoder::finish() {
  if (finished_) fail(ErrorCode::kDoubleFinish, "range encoder already finished");
  finished_ = true;
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(ByteView input) : in_(input) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= in_.size()) {
    fail(ErrorCode::kTruncatedStream, "range decoder ran past " + std::to_string(in_.size()) + " bytes");
  }
  return in_[pos_++];
}

std::uint32_t RangeDecoder::decode(const QuantizedCdf& cdf) {
  const std::uint32_t r = range_ >> kCdfPrecisionBits;
  std::uint32_t target = code_ / r;
  // Only reachable on corrupt input.
  if (target >= kCdfTotal) target = kCdfTotal - 1;
  const std::uint32_t symbol = cdf.find(target);
  code_ -= r * cdf.low(symbol);
  range_ = r * cdf.frequency(symbol);
  while (range_ < kTop) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
  return symbol;
}

Bytes encode_mask_bits(const BinaryMask& mask) {
  Bytes out((mask.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

BinaryMask decode_mask_bits(ByteView bytes, std::size_t length) {
  if (bytes.size() != (length + 7) / 8) {
    fail(ErrorCode::kLengthMismatch, std::to_string(bytes.size()) + " mask bytes for " +
                                         std::to_string(length) + " bits");
  }
  std::vector<std::uint8_t> bits(length);
  for (std::size_t i = 0; i < length; ++i) bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  return BinaryMask(std::move(bits));
}

}  // namespace tokenlink
