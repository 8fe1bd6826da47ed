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

#include "tokenlink/pixel_codec.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "tokenlink/text_codec.hpp"

namespace tokenlink {

namespace {

/// Block index ranges for a dimension of length n under the shifted grid.
std::uint32_t block_count(std::uint32_t n, std::uint32_t offset) {
  return offset + (n - offset + 1) / 2;
}

std::uint32_t block_start(std::uint32_t b, std::uint32_t offset) {
  if (offset == 0) return 2 * b;
  return b == 0 ? 0 : 2 * b - 1;
}

std::uint32_t block_end(std::uint32_t b, std::uint32_t offset, std::uint32_t n) {
  const std::uint32_t end = offset == 0 ? 2 * b + 2 : 2 * b + 1;
  return end > n ? n : end;
}

std::uint32_t levels_for(int quality) { return 1u << quality; }

std::uint32_t quantize(double value, std::uint32_t levels) {
  return static_cast<std::uint32_t>(std::lround(value * (levels - 1) / 255.0));
}

std::uint8_t dequantize(std::uint32_t level, std::uint32_t levels) {
  return static_cast<std::uint8_t>(std::lround(level * 255.0 / (levels - 1)));
}

GrayImage paint(std::uint32_t width, std::uint32_t height, std::uint32_t phase, int quality,
                const std::vector<std::uint32_t>& levels) {
  const std::uint32_t ox = width > 1 ? phase % 2 : 0;
  const std::uint32_t oy = height > 1 ? phase % 2 : 0;
  const std::uint32_t cols = block_count(width, ox);
  const std::uint32_t rows = block_count(height, oy);
  const std::uint32_t n_levels = levels_for(quality);
  GrayImage out = GrayImage::filled(width, height, 0);
  for (std::uint32_t by = 0; by < rows; ++by) {
    for (std::uint32_t bx = 0; bx < cols; ++bx) {
      const std::uint8_t v = dequantize(levels[std::size_t{by} * cols + bx], n_levels);
      for (std::uint32_t y = block_start(by, oy); y < block_end(by, oy, height); ++y) {
        for (std::uint32_t x = block_start(bx, ox); x < block_end(bx, ox, width); ++x) out.at(x, y) = v;
      }
    }
  }
  return out;
}

void check_quality(int quality) {
  if (quality < 1 || quality > 10) {
    fail(ErrorCode::kInvalidArgument, "quality " + std::to_string(quality) + " outside 1..10");
  }
}

}  // namespace

Bytes pixel_encode(const GrayImage& img, int quality, std::uint32_t phase) {
  check_quality(quality);
  const std::uint32_t width = img.width();
  const std::uint32_t height = img.height();
  if (width == 0 || height == 0) fail(ErrorCode::kZeroPixels, "empty image");
  const std::uint32_t ox = width > 1 ? phase % 2 : 0;
  const std::uint32_t oy = height > 1 ? phase % 2 : 0;
  const std::uint32_t cols = block_count(width, ox);
  const std::uint32_t rows = block_count(height, oy);
  const std::uint32_t n_levels = levels_for(quality);
  ByteWriter levels;
  for (std::uint32_t by = 0; by < rows; ++by) {
    for (std::uint32_t bx = 0; bx < cols; ++bx) {
      std::uint32_t sum = 0;
      std::uint32_t count = 0;
      for (std::uint32_t y = block_start(by, oy); y < block_end(by, oy, height); ++y) {
        for (std::uint32_t x = block_start(bx, ox); x < block_end(bx, ox, width); ++x) {
          sum += img.at(x, y);
          ++count;
        }
      }
      const std::uint32_t level = quantize(static_cast<double>(sum) / count, n_levels);
      if (quality > 8) {
        levels.u16(static_cast<std::uint16_t>(level));
      } else {
        levels.u8(static_cast<std::uint8_t>(level));
      }
    }
  }
  ByteWriter w;
  w.u32(width);
  w.u32(height);
  w.u8(static_cast<std::uint8_t>(quality));
  w.u8(static_cast<std::uint8_t>(phase % 2));
  w.raw(brotli_compress(levels.bytes()));
  return std::move(w).take();
}

GrayImage pixel_decode(ByteView bytes) {
  ByteReader r(bytes);
  const std::uint32_t width = r.u32();
  const std::uint32_t height = r.u32();
  const int quality = r.u8();
  const std::uint32_t phase = r.u8();
  if (quality < 1 || quality > 10 || phase > 1 || width == 0 || height == 0 ||
      width > 1u << 16 || height > 1u << 16) {
    fail(ErrorCode::kCorruptPayload, "bad pixel stream header");
  }
  const std::uint32_t cols = block_count(width, width > 1 ? phase : 0);
  const std::uint32_t rows = block_count(height, height > 1 ? phase : 0);
  const std::size_t blocks = std::size_t{cols} * rows;
  const std::size_t level_bytes = quality > 8 ? 2 : 1;
  const Bytes raw = brotli_decompress(r.raw(r.remaining()), blocks * level_bytes);
  if (raw.size() != blocks * level_bytes) fail(ErrorCode::kCorruptPayload, "block count mismatch");
  ByteReader lr(raw, ErrorCode::kCorruptPayload);
  std::vector<std::uint32_t> levels(blocks);
  const std::uint32_t n_levels = levels_for(quality);
  for (std::uint32_t& l : levels) {
    l = quality > 8 ? lr.u16() : lr.u8();
    if (l >= n_levels) fail(ErrorCode::kCorruptPayload, "level out of range");
  }
  return paint(width, height, phase, quality, levels);
}

PixelCodecResult lossy_pixel_codec(const GrayImage& img, int quality, std::uint32_t phase) {
  Bytes bytes = pixel_encode(img, quality, phase);
  GrayImage recon = pixel_decode(bytes);
  return PixelCodecResult{std::move(bytes), std::move(recon)};
}

}  // namespace tokenlink
