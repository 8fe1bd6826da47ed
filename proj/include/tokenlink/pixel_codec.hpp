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

#include "tokenlink/bytes.hpp"
#include "tokenlink/image.hpp"

namespace tokenlink {

/// Baseline lossy image codec: 2x2 block means on a grid shifted by `phase`
/// pixels (mod 2) in both axes, uniform quantization to 2^quality levels,
/// then Brotli. Border blocks cut by the shift average fewer pixels.
///
/// Stream: width u32 | height u32 | quality u8 | phase u8 | Brotli(levels),
/// levels one byte each (two bytes, little-endian, for quality > 8).
struct PixelCodecResult {
  Bytes bytes;
  GrayImage reconstruction;
};

/// Throws InvalidArgument unless 1 <= quality <= 10.
PixelCodecResult lossy_pixel_codec(const GrayImage& img, int quality, std::uint32_t phase = 0);
Bytes pixel_encode(const GrayImage& img, int quality, std::uint32_t phase = 0);
/// Throws CorruptPayload, Truncated.
GrayImage pixel_decode(ByteView bytes);

}  // namespace tokenlink
