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

#include "tokenlink/codebook.hpp"

#include <gtest/gtest.h>

#include <limits>

#include "test_support.hpp"
#include "tokenlink/generator.hpp"

namespace tokenlink {
namespace {

std::vector<GrayImage> scenes(std::uint32_t n) {
  std::vector<GrayImage> out;
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(synthesize_scene(i, 32, 32));
  return out;
}

const PatchCodebook& trained() {
  static const PatchCodebook cb = [] {
    const auto imgs = scenes(3);
    return PatchCodebook::train(imgs, 11);
  }();
  return cb;
}

double distance(const Patch& a, const Patch& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

TEST(Codebook, NearestMatchesBruteForce) {
  const PatchCodebook& cb = trained();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    Patch p{};
    for (double& v : p) v = static_cast<double>(uniform_below(rng, 256));
    double best = std::numeric_limits<double>::infinity();
    TokenId arg = 0;
    for (TokenId k = 0; k < cb.size(); ++k) {
      const double d = distance(p, cb.entry(k));
      if (d < best) {
        best = d;
        arg = k;
      }
    }
    ASSERT_EQ(cb.nearest(p), arg);
  }
}

TEST(Codebook, ConstantImageTokenizesToOneId) {
  const GrayImage img = GrayImage::filled(16, 16, 77);
  const TokenSequence t = mock_tokenize(img, trained());
  ASSERT_EQ(t.size(), 16u);
  for (TokenId id : t.ids()) EXPECT_EQ(id, t[0]);
}

TEST(Codebook, TokenCountFollowsThePatchGrid) {
  const TokenSequence t = mock_tokenize(synthesize_scene(0, 32, 32), trained());
  EXPECT_EQ(t.size(), 64u);
  EXPECT_EQ(t.vocab(), Vocabulary::image(kCodebookSize));
}

TEST(Codebook, DetokenizeIsAFixedPointAfterOneRound) {
  const GrayImage img = synthesize_scene(4, 32, 32);
  const TokenSequence t = mock_tokenize(img, trained());
  const GrayImage once = mock_detokenize(t, trained(), 32, 32);
  EXPECT_EQ(mock_tokenize(once, trained()), t);
  EXPECT_EQ(mock_detokenize(mock_tokenize(once, trained()), trained(), 32, 32), once);
}

TEST(Codebook, Errors) {
  const TokenSequence t = mock_tokenize(synthesize_scene(0, 32, 32), trained());
  EXPECT_TOKENLINK_ERROR(mock_detokenize(t, trained(), 32, 16), ErrorCode::kLengthMismatch);
  EXPECT_TOKENLINK_ERROR(mock_tokenize(GrayImage::filled(6, 8, 0), trained()), ErrorCode::kBadDimensions);
  EXPECT_TOKENLINK_ERROR(PatchCodebook({}), ErrorCode::kInvalidArgument);
  Patch bad{};
  bad[0] = 0.5;
  EXPECT_TOKENLINK_ERROR(PatchCodebook({bad}), ErrorCode::kInvalidArgument);
}

TEST(Codebook, TrainingIsDeterministic) {
  const auto imgs = scenes(2);
  EXPECT_EQ(PatchCodebook::train(imgs, 5).entries(), PatchCodebook::train(imgs, 5).entries());
}

TEST(Codebook, PatchVariance) {
  GrayImage img = GrayImage::filled(8, 4, 10);
  for (std::uint32_t y = 0; y < 4; ++y) img.at(4, y) = 30;
  const auto v = patch_variance(img);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], 0.0);
  // Four of sixteen pixels sit 20 above the rest: mean 15, variance 75.
  EXPECT_DOUBLE_EQ(v[1], 75.0);
}

}  // namespace
}  // namespace tokenlink
