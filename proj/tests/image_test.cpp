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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"

namespace tokenlink {
namespace {

GrayImage gradient(std::uint32_t w, std::uint32_t h) {
  std::vector<std::uint8_t> s(std::size_t{w} * h);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::uint8_t>(i * 7 % 251);
  return GrayImage(w, h, std::move(s));
}

TEST(Bpp, Examples) {
  EXPECT_NEAR(bpp(1690, 512, 512), 0.05157, 5e-6);
  EXPECT_NEAR(bpp(1664, 512, 512), 0.0508, 5e-5);
  EXPECT_EQ(bpp(0, 512, 512), 0.0);
  EXPECT_TOKENLINK_ERROR(bpp(10, 0, 512), ErrorCode::kZeroPixels);
  EXPECT_TOKENLINK_ERROR(bpp(10, 512, 0), ErrorCode::kZeroPixels);
}

TEST(Psnr, IdenticalImagesAreInfinite) {
  const GrayImage a = gradient(8, 8);
  EXPECT_EQ(psnr(a, a), std::numeric_limits<double>::infinity());
}

TEST(Psnr, OffByOneEverywhere) {
  const GrayImage a = GrayImage::filled(16, 16, 100);
  const GrayImage b = GrayImage::filled(16, 16, 101);
  EXPECT_NEAR(psnr(a, b), 48.1308, 1e-4);
  EXPECT_NEAR(psnr(a, b), 20.0 * std::log10(255.0), 1e-12);
}

TEST(Psnr, Errors) {
  EXPECT_TOKENLINK_ERROR(psnr(GrayImage::filled(4, 4, 0), GrayImage::filled(4, 8, 0)), ErrorCode::kDimensionMismatch);
  const GrayImage a = GrayImage::filled(2, 2, 0);
  EXPECT_TOKENLINK_ERROR(psnr_region(a, a, {1, 1}), ErrorCode::kDimensionMismatch);
  EXPECT_TOKENLINK_ERROR(psnr_region(a, a, {0, 0, 0, 0}), ErrorCode::kZeroPixels);
}

TEST(Psnr, RegionIgnoresExcludedPixels) {
  GrayImage a = GrayImage::filled(2, 2, 50);
  GrayImage b = a;
  b.at(1, 1) = 0;
  EXPECT_EQ(psnr_region(a, b, {1, 1, 1, 0}), std::numeric_limits<double>::infinity());
  EXPECT_LT(psnr_region(a, b, {1, 1, 1, 1}), 30.0);
}

TEST(Pgm, RoundTrip) {
  const GrayImage a = gradient(13, 7);
  EXPECT_EQ(decode_pgm(encode_pgm(a)), a);
  testing::TempDir dir("pgm");
  save_pgm(a, dir / "a.pgm");
  EXPECT_EQ(load_pgm(dir / "a.pgm"), a);
}

TEST(Pgm, AcceptsCommentsInTheHeader) {
  const std::string text = "P5\n# made by hand\n2 1\n255\n";
  Bytes b(text.begin(), text.end());
  b.push_back(9);
  b.push_back(200);
  EXPECT_EQ(decode_pgm(b), GrayImage(2, 1, {9, 200}));
}

TEST(Pgm, Errors) {
  const std::string bad = "P2\n1 1\n255\n0";
  EXPECT_TOKENLINK_ERROR(decode_pgm(Bytes(bad.begin(), bad.end())), ErrorCode::kBadMagic);
  Bytes cut = encode_pgm(gradient(4, 4));
  cut.pop_back();
  EXPECT_TOKENLINK_ERROR(decode_pgm(cut), ErrorCode::kTruncated);
  EXPECT_TOKENLINK_ERROR(GrayImage(2, 2, {1, 2, 3}), ErrorCode::kBadDimensions);
}

TEST(Image, CropAndStack) {
  const GrayImage a = gradient(8, 6);
  const GrayImage top = crop(a, 0, 0, 8, 2);
  const GrayImage bottom = crop(a, 0, 2, 8, 4);
  EXPECT_EQ(stack_vertical(top, bottom), a);
  EXPECT_EQ(crop(a, 3, 1, 2, 2).at(1, 1), a.at(4, 2));
  EXPECT_TOKENLINK_ERROR(crop(a, 7, 0, 2, 1), ErrorCode::kBadDimensions);
  EXPECT_TOKENLINK_ERROR(stack_vertical(a, gradient(4, 4)), ErrorCode::kDimensionMismatch);
}

}  // namespace
}  // namespace tokenlink
