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

#include "tokenlink/token_file.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tokenlink/bytes.hpp"

namespace tokenlink {
namespace {

using testing::TempDir;

TEST(TokenFile, RecordLayout) {
  ByteWriter w;
  write_token_record(w, TokenSequence(Vocabulary::text(300), {1, 299}));
  EXPECT_EQ(w.bytes(), (Bytes{'U', 'M', 'T', 'K', 0x2C, 0x01, 0, 0, 2, 0, 0, 0, 0x01, 0xAB, 0x02}));
}

TEST(TokenFile, SingleRecordRoundTrip) {
  TempDir dir("umtk");
  const TokenSequence t(Vocabulary::image(16), {0, 15, 3, 3});
  save_tokens(t, dir / "t.umtk");
  EXPECT_EQ(load_tokens(dir / "t.umtk", Modality::kImage), t);
}

TEST(TokenFile, CorpusRoundTrip) {
  TempDir dir("umtk");
  const std::vector<TokenSequence> corpus{TokenSequence(Vocabulary::text(32), {1, 2}),
                                          TokenSequence(Vocabulary::text(32)),
                                          TokenSequence(Vocabulary::text(32), {31})};
  save_token_corpus(corpus, dir / "c.umtk");
  EXPECT_EQ(load_token_corpus(dir / "c.umtk", Modality::kText), corpus);
  EXPECT_TOKENLINK_ERROR(load_tokens(dir / "c.umtk", Modality::kText), ErrorCode::kInvalidArgument);
}

TEST(TokenFile, MaskRoundTrip) {
  TempDir dir("umtk");
  const BinaryMask m({1, 0, 0, 1, 1});
  save_mask(m, dir / "m.umtk");
  EXPECT_EQ(load_mask(dir / "m.umtk"), m);
}

TEST(TokenFile, FixtureCorpusShape) {
  const auto texts = load_token_corpus(testing::fixtures() / "corpus" / "heldout.text.umtk", Modality::kText);
  const auto images = load_token_corpus(testing::fixtures() / "corpus" / "heldout.image.umtk", Modality::kImage);
  ASSERT_EQ(texts.size(), images.size());
  ASSERT_FALSE(images.empty());
  EXPECT_EQ(images[0].vocab().size(), testing::fixture_suite().autoregressive->image_vocab_size());
  EXPECT_EQ(texts[0].vocab().size(), testing::fixture_suite().text_conditional->text_vocab_size());
}

TEST(TokenFile, Errors) {
  TempDir dir("umtk");
  const Bytes bad_magic{'U', 'M', 'T', 'X', 4, 0, 0, 0, 0, 0, 0, 0};
  write_file(dir / "a", bad_magic);
  EXPECT_TOKENLINK_ERROR(load_tokens(dir / "a", Modality::kText), ErrorCode::kBadMagic);
  const Bytes out_of_range{'U', 'M', 'T', 'K', 4, 0, 0, 0, 1, 0, 0, 0, 4};
  write_file(dir / "b", out_of_range);
  EXPECT_TOKENLINK_ERROR(load_tokens(dir / "b", Modality::kText), ErrorCode::kOutOfRangeToken);
  const Bytes short_count{'U', 'M', 'T', 'K', 4, 0, 0, 0, 3, 0, 0, 0, 1};
  write_file(dir / "c", short_count);
  EXPECT_TOKENLINK_ERROR(load_tokens(dir / "c", Modality::kText), ErrorCode::kTruncated);
  EXPECT_TOKENLINK_ERROR(load_tokens(dir / "missing", Modality::kText), ErrorCode::kIoError);
}

}  // namespace
}  // namespace tokenlink
