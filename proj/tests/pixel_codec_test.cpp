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

#include <gtest/gtest.h>

#include <limits>

#include "test_support.hpp"
#include "tokenlink/generator.hpp"

namespace tokenlink {
namespace {

TEST(PixelCodec, ConstantImageAtQualityEightIsExact) {
  const GrayImage img = GrayImage::filled(32, 32, 100);
  const PixelCodecResult r = lossy_pixel_codec(img, 8);
  EXPECT_EQ(psnr(img, r.reconstruction), std::numeric_limits<double>::infinity());
}

TEST(PixelCodec, LowerQualityIsWorse) {
  const GrayImage img = synthesize_scene(1);
  EXPECT_LT(psnr(img, lossy_pixel_codec(img, 2).reconstruction), psnr(img, lossy_pixel_codec(img, 8).reconstruction));
  EXPECT_LT(pixel_encode(img, 2).size(), pixel_encode(img, 8).size());
}

TEST(PixelCodec, RepeatedRoundsDegradeStrictly) {
  const GrayImage img = synthesize_scene(2);
  GrayImage current = img;
  double previous = std::numeric_limits<double>::infinity();
  for (std::uint32_t round = 0; round < 3; ++round) {
    current = lossy_pixel_codec(current, 6, round).reconstruction;
    const double q = psnr(img, current);
    EXPECT_LT(q, previous) << "round " << round;
    previous = q;
  }
}

TEST(PixelCodec, DecodeMatchesEncode) {
  const GrayImage img = synthesize_scene(3, 36, 20);
  for (int q : {1, 5, 9, 10}) {
    for (std::uint32_t phase : {0u, 1u}) {
      const PixelCodecResult r = lossy_pixel_codec(img, q, phase);
      EXPECT_EQ(pixel_decode(r.bytes), r.reconstruction);
      EXPECT_EQ(r.reconstruction.width(), 36u);
      EXPECT_EQ(r.reconstruction.height(), 20u);
    }
  }
}

TEST(PixelCodec, Errors) {
  const GrayImage img = GrayImage::filled(4, 4, 1);
  EXPECT_TOKENLINK_ERROR(pixel_encode(img, 0), ErrorCode::kInvalidArgument);
  EXPECT_TOKENLINK_ERROR(pixel_encode(img, 11), ErrorCode::kInvalidArgument);
  EXPECT_TOKENLINK_ERROR(pixel_encode(GrayImage(), 5), ErrorCode::kZeroPixels);
  Bytes b = pixel_encode(img, 5);
  b[8] = 0;
  EXPECT_TOKENLINK_ERROR(pixel_decode(b), ErrorCode::kCorruptPayload);
  Bytes cut = pixel_encode(img, 5);
  cut.resize(12);
  EXPECT_TOKENLINK_ERROR(pixel_decode(cut), ErrorCode::kCorruptPayload);
}

}  // namespace
}  // namespace tokenlink
