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

#include "tokenlink/bytes.hpp"
#include "tokenlink/cdf.hpp"
#include "tokenlink/tokens.hpp"

namespace tokenlink {

/// 32-bit range coder over 16-bit cumulative frequencies with byte-wise
/// renormalisation. Carries are resolved with a cached byte plus a count of
/// pending 0xFF bytes. The stream has no header; finish() appends a 4-byte
/// tail, and the decoder reads exactly the bytes the encoder produced.
class RangeEncoder {
 public:
  void encode(const QuantizedCdf& cdf, std::uint32_t symbol);
  /// Flushes the coder state. Calling it a second time throws DoubleFinish.
  Bytes finish();

  /// Bytes emitted so far, excluding the unflushed state.
  std::size_t bytes_written() const { return out_.size(); }

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ = 1;
  bool first_byte_ = true;
  bool finished_ = false;
  Bytes out_;
};

class RangeDecoder {
 public:
  /// Throws TruncatedStream when the input is shorter than the 4-byte tail.
  explicit RangeDecoder(ByteView input);

  std::uint32_t decode(const QuantizedCdf& cdf);

  std::size_t bytes_consumed() const { return pos_; }

 private:
  std::uint8_t next_byte();

  ByteView in_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

/// Equi-probable mask coding: one payload bit per mask bit, row-major,
/// most-significant bit first, zero-padded final byte.
Bytes encode_mask_bits(const BinaryMask& mask);
/// Throws LengthMismatch unless bytes.size() == ceil(length / 8).
BinaryMask decode_mask_bits(ByteView bytes, std::size_t length);

}  // namespace tokenlink
