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

#include "tokenlink/bench.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tokenlink/image.hpp"
#include "tokenlink/token_file.hpp"

namespace tokenlink {
namespace {

const BenchRow* find_row(const BenchReport& r, Task task, Direction dir, ModelKind model) {
  for (const BenchRow& row : r.rows) {
    if (row.task == task && row.direction == dir && row.model == model) return &row;
  }
  return nullptr;
}

TEST(Bench, UniformAnchor) {
  const AnchorResult a = uniform_anchor(0);
  EXPECT_EQ(a.token_count, 1024u);
  EXPECT_NEAR(a.bpp, 0.0508, 0.0508 * 0.005);
  EXPECT_EQ(a.bpp, bpp(a.payload_bytes, 512, 512));
}

TEST(Bench, LearnedModelsBeatUniformOnACorpusSlice) {
  const auto texts = load_token_corpus(testing::fixtures() / "corpus" / "heldout.text.umtk", Modality::kText);
  const auto images = load_token_corpus(testing::fixtures() / "corpus" / "heldout.image.umtk", Modality::kImage);
  const std::vector<TokenSequence> t(texts.begin(), texts.begin() + 8);
  const std::vector<TokenSequence> i(images.begin(), images.begin() + 8);
  const BenchReport r = run_bench(t, i, testing::fixture_suite(), 1);
  const BenchRow* uniform = find_row(r, Task::kVqa, Direction::kUplink, ModelKind::kUniform);
  const BenchRow* ar = find_row(r, Task::kVqa, Direction::kUplink, ModelKind::kAutoregressive);
  const BenchRow* tc = find_row(r, Task::kTextToImage, Direction::kDownlink, ModelKind::kTextConditional);
  ASSERT_TRUE(uniform && ar && tc);
  EXPECT_LT(ar->bits_per_token(), uniform->bits_per_token());
  EXPECT_LT(tc->bits_per_token(), ar->bits_per_token());
  EXPECT_EQ(uniform->bits_per_token(), 4.0);
  for (const BenchRow& row : r.rows) {
    EXPECT_GT(row.coded_tokens, 0u);
    EXPECT_LE(8.0 * static_cast<double>(row.payload_bytes), row.cross_entropy_bits + 64.0 * 8);
  }
  EXPECT_EQ(r.to_csv(), run_bench(t, i, testing::fixture_suite(), 1).to_csv());
}

TEST(Bench, Errors) {
  const std::vector<TokenSequence> none;
  EXPECT_TOKENLINK_ERROR(run_bench(none, none, testing::fixture_suite(), 0), ErrorCode::kEmptyCorpus);
  EXPECT_TOKENLINK_ERROR(run_bench(none, none, ModelSuite{}, 0), ErrorCode::kMissingModel);
}

}  // namespace
}  // namespace tokenlink
