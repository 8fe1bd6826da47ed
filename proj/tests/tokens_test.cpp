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

#include "tokenlink/tokens.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace tokenlink {
namespace {

using testing::random_ids;
using testing::random_mask;

const Vocabulary kImage16 = Vocabulary::image(16);

TEST(Vocabulary, MaskIdIsOnePastTheLastOrdinaryId) {
  EXPECT_EQ(kImage16.mask_token_id(), 16u);
  EXPECT_EQ(Vocabulary::image(8192).mask_token_id(), 8192u);
  EXPECT_FALSE(Vocabulary::text(32).has_mask_token());
  EXPECT_TOKENLINK_ERROR(Vocabulary::text(32).mask_token_id(), ErrorCode::kVocabularyLacksMaskToken);
}

TEST(Vocabulary, RejectsFewerThanTwoSymbols) {
  EXPECT_TOKENLINK_ERROR(Vocabulary::text(1), ErrorCode::kInvalidVocabulary);
  EXPECT_TOKENLINK_ERROR(Vocabulary::image(0), ErrorCode::kInvalidVocabulary);
}

TEST(ValidateSequence, AcceptsInRangeIds) {
  EXPECT_NO_THROW(validate_sequence(Vocabulary::text(4), std::vector<TokenId>{0, 1, 2}));
  EXPECT_NO_THROW(validate_sequence(Vocabulary::text(4), std::vector<TokenId>{}));
}

TEST(ValidateSequence, ReportsFirstOutOfRangePosition) {
  try {
    validate_sequence(Vocabulary::text(4), std::vector<TokenId>{0, 4});
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRangeToken);
    EXPECT_NE(std::string(e.what()).find("position 1 holds id 4"), std::string::npos) << e.what();
  }
}

TEST(TokenSequence, RejectsTheMaskId) {
  EXPECT_TOKENLINK_ERROR(TokenSequence(kImage16, {3, 16}), ErrorCode::kOutOfRangeToken);
}

TEST(BinaryMask, CountsOnes) {
  const BinaryMask m({0, 1, 1, 0, 1});
  EXPECT_EQ(m.size(), 5u);
  EXPECT_EQ(m.ones_count(), 3u);
  EXPECT_TOKENLINK_ERROR(BinaryMask({0, 2}), ErrorCode::kInvalidArgument);
}

TEST(MaskedSequence, PlaceholdersMustMatchTheMask) {
  EXPECT_NO_THROW(MaskedSequence(kImage16, {5, 16}, BinaryMask({0, 1})));
  EXPECT_TOKENLINK_ERROR(MaskedSequence(kImage16, {5, 9}, BinaryMask({0, 1})), ErrorCode::kInvalidArgument);
  EXPECT_TOKENLINK_ERROR(MaskedSequence(kImage16, {16, 9}, BinaryMask({0, 0})), ErrorCode::kInvalidArgument);
  EXPECT_TOKENLINK_ERROR(MaskedSequence(kImage16, {5}, BinaryMask({0, 1})), ErrorCode::kLengthMismatch);
}

TEST(ApplyMask, ReplacesMaskedPositions) {
  const TokenSequence u(kImage16, {5, 9, 2, 7});
  const MaskedSequence m = apply_mask(u, BinaryMask({0, 1, 1, 0}));
  EXPECT_EQ(std::vector<TokenId>(m.ids().begin(), m.ids().end()), (std::vector<TokenId>{5, 16, 16, 7}));
}

TEST(ApplyMask, IdentityAndAllMasked) {
  const TokenSequence u(kImage16, {5, 9});
  const MaskedSequence none = apply_mask(u, BinaryMask::zeros(2));
  EXPECT_EQ(std::vector<TokenId>(none.ids().begin(), none.ids().end()), (std::vector<TokenId>{5, 9}));
  const MaskedSequence all = apply_mask(u, BinaryMask::ones(2));
  EXPECT_EQ(std::vector<TokenId>(all.ids().begin(), all.ids().end()), (std::vector<TokenId>{16, 16}));
}

TEST(ApplyMask, Errors) {
  const TokenSequence u(kImage16, {5, 9});
  EXPECT_TOKENLINK_ERROR(apply_mask(u, BinaryMask::zeros(3)), ErrorCode::kLengthMismatch);
  const TokenSequence no_mask(Vocabulary::image(16, false), {5, 9});
  EXPECT_TOKENLINK_ERROR(apply_mask(no_mask, BinaryMask::zeros(2)), ErrorCode::kVocabularyLacksMaskToken);
}

TEST(ExtractValid, KeepsUnmaskedInOrder) {
  const TokenSequence u(kImage16, {5, 9, 2, 7});
  EXPECT_EQ(extract_valid(u, BinaryMask({0, 1, 1, 0})).id_vector(), (std::vector<TokenId>{5, 7}));
  EXPECT_EQ(extract_valid(u, BinaryMask::zeros(4)).id_vector(), (std::vector<TokenId>{5, 9, 2, 7}));
  EXPECT_TRUE(extract_valid(u, BinaryMask::ones(4)).empty());
  EXPECT_TOKENLINK_ERROR(extract_valid(u, BinaryMask::ones(3)), ErrorCode::kLengthMismatch);
}

TEST(MergeGenerated, FillsMaskedPositions) {
  const MaskedSequence base(kImage16, {5, 16, 16, 7}, BinaryMask({0, 1, 1, 0}));
  EXPECT_EQ(merge_generated(base, TokenSequence(kImage16, {3, 1})).id_vector(),
            (std::vector<TokenId>{5, 3, 1, 7}));
  const MaskedSequence identity(kImage16, {5, 9}, BinaryMask::zeros(2));
  EXPECT_EQ(merge_generated(identity, TokenSequence(kImage16)).id_vector(), (std::vector<TokenId>{5, 9}));
  const MaskedSequence all(kImage16, {16, 16}, BinaryMask::ones(2));
  EXPECT_EQ(merge_generated(all, TokenSequence(kImage16, {8, 8})).id_vector(), (std::vector<TokenId>{8, 8}));
}

TEST(MergeGenerated, Errors) {
  const MaskedSequence base(kImage16, {5, 16, 16, 7}, BinaryMask({0, 1, 1, 0}));
  EXPECT_TOKENLINK_ERROR(merge_generated(base, TokenSequence(kImage16, {3})), ErrorCode::kLengthMismatch);
  EXPECT_TOKENLINK_ERROR(merge_generated(base, std::vector<TokenId>{3, 16}), ErrorCode::kMaskTokenInGenerated);
}

TEST(ConcatModalities, KeepsSeparateIdSpaces) {
  const TokenSequence t(Vocabulary::text(32), {1, 2});
  const JointSequence z = concat_modalities(t, TokenSequence(kImage16, {7, 7}));
  EXPECT_EQ(z.text.id_vector(), (std::vector<TokenId>{1, 2}));
  EXPECT_EQ(std::get<TokenSequence>(z.image).id_vector(), (std::vector<TokenId>{7, 7}));

  const JointSequence image_only = concat_modalities(TokenSequence(Vocabulary::text(32)), TokenSequence(kImage16, {7}));
  EXPECT_TRUE(image_only.text.empty());

  const MaskedSequence masked(kImage16, {16, 4}, BinaryMask({1, 0}));
  const JointSequence with_mask = concat_modalities(TokenSequence(Vocabulary::text(32), {1}), masked);
  EXPECT_EQ(std::get<MaskedSequence>(with_mask.image), masked);
}

TEST(ConcatModalities, RejectsSwappedVocabularies) {
  const TokenSequence t(Vocabulary::text(32), {1});
  const TokenSequence u(kImage16, {1});
  EXPECT_TOKENLINK_ERROR(concat_modalities(u, u), ErrorCode::kVocabularyKindMismatch);
  EXPECT_TOKENLINK_ERROR(concat_modalities(t, TokenSequence(Vocabulary::text(32), {1})),
                         ErrorCode::kVocabularyKindMismatch);
}

TEST(TokenAlgebraProperty, MergeOfMaskedTokensRestoresTheSequence) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = uniform_below(rng, 200);
    const TokenSequence u(kImage16, random_ids(rng, n, 16));
    const BinaryMask m = random_mask(rng, n, uniform_unit(rng));
    const MaskedSequence masked = apply_mask(u, m);
    EXPECT_EQ(merge_generated(masked, extract_at_masked(u, m)), u);
    EXPECT_EQ(extract_valid(u, m).size() + m.ones_count(), n);
    // Applying the same mask to the restored sequence gives the same result.
    EXPECT_EQ(apply_mask(merge_generated(masked, extract_at_masked(u, m)), m), masked);
  }
}

}  // namespace
}  // namespace tokenlink
