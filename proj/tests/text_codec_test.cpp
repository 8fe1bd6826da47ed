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

#include "tokenlink/text_codec.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tokenlink/bytes.hpp"
#include "tokenlink/generator.hpp"

namespace tokenlink {
namespace {

using testing::random_ids;

const Vocabulary kGptSized = Vocabulary::text(50257);

TEST(TextCodec, EmptySequence) {
  const TextPayload p = compress_text_tokens(TokenSequence(kGptSized));
  EXPECT_EQ(p.token_count, 0u);
  EXPECT_EQ(p.compressed, brotli_compress({}));
  EXPECT_TRUE(decompress_text_tokens(p, kGptSized).empty());
}

TEST(TextCodec, RepetitiveInputCompresses) {
  const TokenSequence t(kGptSized, std::vector<TokenId>(1000, 7));
  const TextPayload p = compress_text_tokens(t);
  EXPECT_LT(p.compressed.size(), 1000u);
  EXPECT_EQ(decompress_text_tokens(p, kGptSized), t);
}

TEST(TextCodec, SerializesAsLeb128BeforeCompression) {
  const TokenSequence t(kGptSized, {0, 127, 128, 300, 50256});
  const Bytes raw = brotli_decompress(compress_text_tokens(t).compressed, 1 << 20);
  EXPECT_EQ(raw, (Bytes{0x00, 0x7F, 0x80, 0x01, 0xAC, 0x02, 0xD0, 0x88, 0x03}));
}

TEST(TextCodec, RandomIdsRoundTrip) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const TokenSequence t(kGptSized, random_ids(rng, 64, 50257));
    ASSERT_EQ(decompress_text_tokens(compress_text_tokens(t), kGptSized), t);
  }
}

TEST(TextCodec, PromptCorpusRoundTrip) {
  const auto prompts = synthetic_prompts(1000, 3);
  const WordTokenizer tok = WordTokenizer::train(prompts);
  for (const std::string& s : prompts) {
    const TokenSequence t = tok.encode(s);
    const TokenSequence back = decompress_text_tokens(compress_text_tokens(t), tok.vocabulary());
    ASSERT_EQ(back, t);
    ASSERT_EQ(tok.decode(back), s);
  }
}

TEST(TextCodec, TruncatedPayloadIsCorrupt) {
  std::mt19937_64 rng(2);
  const TokenSequence t(kGptSized, random_ids(rng, 64, 50257));
  TextPayload p = compress_text_tokens(t);
  p.compressed.pop_back();
  EXPECT_TOKENLINK_ERROR(decompress_text_tokens(p, kGptSized), ErrorCode::kCorruptPayload);
  p.compressed.clear();
  EXPECT_TOKENLINK_ERROR(decompress_text_tokens(p, kGptSized), ErrorCode::kCorruptPayload);
}

TEST(TextCodec, GarbageIsCorrupt) {
  TextPayload p{3, Bytes{0xDE, 0xAD, 0xBE, 0xEF, 0x00}};
  EXPECT_TOKENLINK_ERROR(decompress_text_tokens(p, kGptSized), ErrorCode::kCorruptPayload);
}

TEST(TextCodec, TokenCountMismatch) {
  TextPayload p = compress_text_tokens(TokenSequence(kGptSized, {1, 2, 3, 4}));
  p.token_count = 5;
  EXPECT_TOKENLINK_ERROR(decompress_text_tokens(p, kGptSized), ErrorCode::kTokenCountMismatch);
  p.token_count = 3;
  EXPECT_TOKENLINK_ERROR(decompress_text_tokens(p, kGptSized), ErrorCode::kTokenCountMismatch);
}

TEST(TextCodec, IdsOutsideTheVocabulary) {
  const TextPayload p = compress_text_tokens(TokenSequence(kGptSized, {1, 40000}));
  EXPECT_TOKENLINK_ERROR(decompress_text_tokens(p, Vocabulary::text(1000)), ErrorCode::kOutOfRangeToken);
}

TEST(WordTokenizer, LosslessOnArbitraryText) {
  const auto prompts = synthetic_prompts(200, 1);
  const WordTokenizer tok = WordTokenizer::train(prompts);
  for (const std::string s : {"", "unseen words, and Ünïcödé bytes!", "  double  spaces\n", "a"}) {
    EXPECT_EQ(tok.decode(tok.encode(s)), s);
  }
}

TEST(WordTokenizer, FrequentPiecesGetLowIds) {
  const std::vector<std::string> corpus{"the cat the dog the end", "the cat"};
  const WordTokenizer tok = WordTokenizer::train(corpus);
  const TokenSequence t = tok.encode("the cat");
  EXPECT_EQ(t.size(), 2u);
  for (TokenId id : t.ids()) EXPECT_GE(id, 256u);
  EXPECT_EQ(WordTokenizer::split("a red fox."), (std::vector<std::string_view>{"a", " red", " fox", "."}));
}

TEST(CompressionRatio, EmptyCorpus) {
  const std::vector<std::string> empty_string{""};
  EXPECT_TOKENLINK_ERROR(raw_compression_ratio(empty_string), ErrorCode::kEmptyCorpus);
  const WordTokenizer tok = WordTokenizer::train(empty_string);
  EXPECT_TOKENLINK_ERROR(token_compression_ratio(empty_string, tok), ErrorCode::kEmptyCorpus);
  EXPECT_TOKENLINK_ERROR(raw_compression_ratio({}), ErrorCode::kEmptyCorpus);
}

TEST(CompressionRatio, TokenizeThenCompressBeatsRawBytes) {
  const auto prompts = synthetic_prompts(1000, 7);
  const WordTokenizer tok = WordTokenizer::train(prompts);
  const double raw = raw_compression_ratio(prompts);
  const double tokenized = token_compression_ratio(prompts, tok);
  EXPECT_LT(tokenized, raw);
  EXPECT_GT(raw, 0.0);
}

}  // namespace
}  // namespace tokenlink
