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

#include "tokenlink/generator.hpp"

#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"
#include "tokenlink/text_codec.hpp"

namespace tokenlink {
namespace {

using testing::random_ids;

const Vocabulary kImage = Vocabulary::image(256);

TEST(Generator, Deterministic) {
  const TokenSequence text(Vocabulary::text(100), {1, 2, 3});
  EXPECT_EQ(MockGenerator(1).text_to_image(text, 64, kImage), MockGenerator(1).text_to_image(text, 64, kImage));
  EXPECT_NE(MockGenerator(1).text_to_image(text, 64, kImage), MockGenerator(2).text_to_image(text, 64, kImage));
}

TEST(Generator, DistinctPromptsGiveDistinctImages) {
  const auto prompts = synthetic_prompts(1000, 4);
  const WordTokenizer tok = WordTokenizer::train(prompts);
  const MockGenerator gen(9);
  std::set<std::string> unique_prompts(prompts.begin(), prompts.end());
  std::set<std::vector<TokenId>> images;
  for (const std::string& p : unique_prompts) images.insert(gen.text_to_image(tok.encode(p), 64, kImage).id_vector());
  EXPECT_EQ(images.size(), unique_prompts.size());
}

TEST(Generator, OutputShapes) {
  std::mt19937_64 rng(1);
  const TokenSequence text(Vocabulary::text(100), {5, 6});
  const TokenSequence image(kImage, random_ids(rng, 64, 256));
  const BinaryMask mask = testing::random_mask(rng, 64, 0.3);
  const MockGenerator gen(3);
  const TokenSequence filled = gen.inpaint(text, apply_mask(image, mask));
  EXPECT_EQ(filled.size(), mask.ones_count());
  EXPECT_EQ(filled.vocab(), Vocabulary::image(256));
  EXPECT_EQ(gen.outpaint(text, image, 17).size(), 17u);
  const TokenSequence answer = gen.answer(text, image);
  EXPECT_EQ(answer.size(), kAnswerLength);
  EXPECT_EQ(answer.vocab(), text.vocab());
}

TEST(Generator, CloudDispatch) {
  std::mt19937_64 rng(2);
  const MockGenerator gen(3);
  UplinkContents c;
  c.text = TokenSequence(Vocabulary::text(100), {5, 6});
  GenerationParams params;
  params.image_tokens = 40;
  params.image_vocab = 256;
  EXPECT_EQ(mock_cloud_generate(gen, Task::kTextToImage, c, params).size(), 40u);
  EXPECT_TOKENLINK_ERROR(mock_cloud_generate(gen, Task::kVqa, c, params), ErrorCode::kMissingModality);
  c.image = TokenSequence(kImage, random_ids(rng, 30, 256));
  EXPECT_EQ(mock_cloud_generate(gen, Task::kOutpaint, c, params).size(), 15u);
  params.outpaint_extension = 4;
  EXPECT_EQ(mock_cloud_generate(gen, Task::kOutpaint, c, params).size(), 4u);
  EXPECT_EQ(mock_cloud_generate(gen, Task::kVqa, c, params).size(), kAnswerLength);
  UplinkContents no_text;
  EXPECT_TOKENLINK_ERROR(mock_cloud_generate(gen, Task::kTextToImage, no_text, params), ErrorCode::kMissingModality);
}

TEST(Generator, SyntheticData) {
  EXPECT_EQ(synthetic_prompts(50, 1), synthetic_prompts(50, 1));
  EXPECT_EQ(synthetic_prompts(50, 1).size(), 50u);
  const GrayImage a = synthesize_scene(3);
  EXPECT_EQ(a.width(), 64u);
  EXPECT_EQ(a, synthesize_scene(3));
  EXPECT_NE(a, synthesize_scene(4));
}

}  // namespace
}  // namespace tokenlink
