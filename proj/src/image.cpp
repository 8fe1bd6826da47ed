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

#include "tokenlink/image.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace tokenlink {

GrayImage::GrayImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width == 0 || height == 0) fail(ErrorCode::kBadDimensions, "image dimensions must be positive");
  if (samples_.size() != std::size_t{width} * height) {
    fail(ErrorCode::kBadDimensions, "sample count does not match dimensions");
  }
}

GrayImage GrayImage::filled(std::uint32_t width, std::uint32_t height, std::uint8_t value) {
  return GrayImage(width, height, std::vector<std::uint8_t>(std::size_t{width} * height, value));
}

Bytes encode_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), image.samples().begin(), image.samples().end());
  return out;
}

namespace {

class PgmScanner {
 public:
  explicit PgmScanner(ByteView bytes) : bytes_(bytes) {}

  std::uint32_t number() {
    skip_space_and_comments();
    std::uint64_t v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (++digits > 9) fail(ErrorCode::kBadDimensions, "PGM header number too large");
    }
    if (digits == 0) fail(ErrorCode::kBadDimensions, "malformed PGM header");
    return static_cast<std::uint32_t>(v);
  }

  std::size_t position() const { return pos_; }
  void advance() { ++pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  ByteView bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pgm(ByteView bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    fail(ErrorCode::kBadMagic, "not a binary PGM");
  }
  PgmScanner s(bytes.subspan(2));
  const std::uint32_t width = s.number();
  const std::uint32_t height = s.number();
  const std::uint32_t maxval = s.number();
  if (maxval != 255) fail(ErrorCode::kBadDimensions, "only 8-bit PGM is supported");
  s.advance();  // single whitespace byte before the raster
  const std::size_t start = 2 + s.position();
  const std::size_t count = std::size_t{width} * height;
  if (start > bytes.size() || bytes.size() - start < count) fail(ErrorCode::kTruncated, "PGM raster truncated");
  return GrayImage(width, height,
                   std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                                             bytes.begin() + static_cast<std::ptrdiff_t>(start + count)));
}

GrayImage load_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
  write_file(path, encode_pgm(image));
}

namespace {

double psnr_from(std::uint64_t sse, std::size_t count) {
  if (count == 0) fail(ErrorCode::kZeroPixels, "no pixels to compare");
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(sse) / static_cast<double>(count);
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

void require_same_dims(const GrayImage& a, const GrayImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    fail(ErrorCode::kDimensionMismatch, "PSNR needs equal dimensions");
  }
}

}  // namespace

double psnr(const GrayImage& a, const GrayImage& b) {
  require_same_dims(a, b);
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    const int d = static_cast<int>(a.samples()[i]) - static_cast<int>(b.samples()[i]);
    sse += static_cast<std::uint64_t>(d * d);
  }
  return psnr_from(sse, a.pixel_count());
}

double psnr_region(const GrayImage& a, const GrayImage& b, const std::vector<std::uint8_t>& include) {
  require_same_dims(a, b);
  if (include.size() != a.pixel_count()) fail(ErrorCode::kDimensionMismatch, "region size differs");
  std::uint64_t sse = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    if (!include[i]) continue;
    const int d = static_cast<int>(a.samples()[i]) - static_cast<int>(b.samples()[i]);
    sse += static_cast<std::uint64_t>(d * d);
    ++count;
  }
  return psnr_from(sse, count);
}

GrayImage crop(const GrayImage& img, std::uint32_t x, std::uint32_t y, std::uint32_t width,
               std::uint32_t height) {
  if (std::uint64_t{x} + width > img.width() || std::uint64_t{y} + height > img.height()) {
    fail(ErrorCode::kBadDimensions, "crop window outside the image");
  }
  std::vector<std::uint8_t> samples;
  samples.reserve(std::size_t{width} * height);
  for (std::uint32_t r = 0; r < height; ++r) {
    for (std::uint32_t c = 0; c < width; ++c) samples.push_back(img.at(x + c, y + r));
  }
  return GrayImage(width, height, std::move(samples));
}

GrayImage stack_vertical(const GrayImage& top, const GrayImage& bottom) {
  if (top.width() != bottom.width()) fail(ErrorCode::kDimensionMismatch, "widths differ");
  std::vector<std::uint8_t> samples = top.samples();
  samples.insert(samples.end(), bottom.samples().begin(), bottom.samples().end());
  return GrayImage(top.width(), top.height() + bottom.height(), std::move(samples));
}

double bpp(std::size_t bytes, std::uint64_t width, std::uint64_t height) {
  if (width == 0 || height == 0) fail(ErrorCode::kZeroPixels, "bpp over zero pixels");
  return static_cast<double>(bytes) * 8.0 / static_cast<double>(width * height);
}

}  // namespace tokenlink
