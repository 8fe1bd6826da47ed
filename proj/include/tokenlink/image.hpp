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
#include <filesystem>
#include <vector>

#include "tokenlink/bytes.hpp"

namespace tokenlink {

/// 8-bit grayscale image, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  /// Throws BadDimensions for zero sizes or a sample count mismatch.
  GrayImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> samples);
  static GrayImage filled(std::uint32_t width, std::uint32_t height, std::uint8_t value);

  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  std::size_t pixel_count() const { return samples_.size(); }
  std::uint8_t at(std::uint32_t x, std::uint32_t y) const { return samples_[std::size_t{y} * width_ + x]; }
  std::uint8_t& at(std::uint32_t x, std::uint32_t y) { return samples_[std::size_t{y} * width_ + x]; }
  const std::vector<std::uint8_t>& samples() const { return samples_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<std::uint8_t> samples_;
};

/// Binary PGM (P5, maxval 255).
Bytes encode_pgm(const GrayImage& image);
GrayImage decode_pgm(ByteView bytes);
GrayImage load_pgm(const std::filesystem::path& path);
void save_pgm(const GrayImage& image, const std::filesystem::path& path);

/// 10 log10(255^2 / MSE); +infinity for identical images.
/// Throws DimensionMismatch.
double psnr(const GrayImage& a, const GrayImage& b);

/// PSNR over the pixels whose `include` flag is set (row-major, one flag
/// per pixel). Throws DimensionMismatch, ZeroPixels when nothing is
/// included.
double psnr_region(const GrayImage& a, const GrayImage& b, const std::vector<std::uint8_t>& include);

GrayImage crop(const GrayImage& img, std::uint32_t x, std::uint32_t y, std::uint32_t width,
               std::uint32_t height);
/// `top` above `bottom`; widths must match (DimensionMismatch).
GrayImage stack_vertical(const GrayImage& top, const GrayImage& bottom);

/// bytes * 8 / (width * height). Throws ZeroPixels.
double bpp(std::size_t bytes, std::uint64_t width, std::uint64_t height);

}  // namespace tokenlink
