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

#include "tokenlink/entropy_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "test_support.hpp"
#include "tokenlink/bench.hpp"
#include "tokenlink/transformer.hpp"

namespace tokenlink {
namespace {

using testing::fixture_suite;
using testing::random_ids;
using testing::random_mask;

std::vector<std::uint32_t> cum_of(const QuantizedCdf& cdf) {
  return {cdf.cumulative().begin(), cdf.cumulative().end()};
}

std::shared_ptr<const EntropyModelWeights> random_weights(ModelMode mode, std::uint32_t v, std::uint64_t seed,
                                                          double scale = 0.3) {
  return std::make_shared<const EntropyModelWeights>(EntropyModelWeights::random(mode, v, 32, seed, scale));
}

void expect_valid(const QuantizedCdf& cdf) {
  const auto cum = cdf.cumulative();
  ASSERT_EQ(cum.front(), 0u);
  ASSERT_EQ(cum.back(), kCdfTotal);
  for (std::size_t k = 0; k + 1 < cum.size(); ++k) ASSERT_LT(cum[k], cum[k + 1]);
}

std::vector<QuantizedCdf> incremental_cdfs(SymbolModel& model, const std::vector<TokenId>& ids) {
  std::vector<QuantizedCdf> out;
  for (TokenId id : ids) {
    out.push_back(model.next_cdf());
    model.observe(id);
  }
  return out;
}

TEST(UniformModel, CrossEntropyIsThirteenBitsPerToken) {
  std::mt19937_64 rng(1);
  const TokenSequence seq(Vocabulary::image(8192), random_ids(rng, 1024, 8192));
  EXPECT_EQ(cross_entropy_bits(ModelKind::kUniform, seq), 13312.0);
}

TEST(UniformModel, ThreeSymbolCost) {
  const TokenSequence seq(Vocabulary::image(3), {0});
  EXPECT_NEAR(cross_entropy_bits(ModelKind::kUniform, seq), -std::log2(21846.0 / 65536.0), 1e-12);
  EXPECT_NEAR(cross_entropy_bits(ModelKind::kUniform, seq), 1.5849, 1e-4);
}

TEST(AdaptiveModel, CountsStartAtOneAndIncrement) {
  AdaptiveFreqModel m(4);
  EXPECT_EQ(std::vector<std::uint32_t>(m.counts().begin(), m.counts().end()),
            (std::vector<std::uint32_t>{1, 1, 1, 1}));
  m.observe(2);
  m.observe(2);
  m.observe(7);  // placeholder: ignored
  EXPECT_EQ(std::vector<std::uint32_t>(m.counts().begin(), m.counts().end()),
            (std::vector<std::uint32_t>{1, 1, 3, 1}));
  EXPECT_EQ(cum_of(m.next_cdf()), cum_of(quantize_counts(std::vector<std::uint32_t>{1, 1, 3, 1})));
}

TEST(AdaptiveModel, HalvesAtTheCap) {
  AdaptiveFreqModel m(2);
  for (std::uint32_t i = 0; i + 2 < AdaptiveFreqModel::kCountCap; ++i) m.observe(0);
  EXPECT_EQ(m.counts()[0], AdaptiveFreqModel::kCountCap - 1);
  m.observe(0);
  EXPECT_EQ(m.counts()[0], AdaptiveFreqModel::kCountCap / 2);
  EXPECT_EQ(m.counts()[1], 1u);
  expect_valid(m.next_cdf());
}

TEST(AdaptiveModel, LockstepRoundTripProperty) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint32_t v = 2 + static_cast<std::uint32_t>(uniform_below(rng, 500));
    // Skewed sequences so the model actually adapts.
    const std::uint32_t hot = static_cast<std::uint32_t>(uniform_below(rng, v));
    std::vector<TokenId> ids(uniform_below(rng, 400));
    for (TokenId& id : ids) id = uniform_below(rng, 3) ? hot : static_cast<TokenId>(uniform_below(rng, v));
    AdaptiveFreqModel enc_model(v);
    AdaptiveFreqModel dec_model(v);
    const Bytes bytes = encode_tokens(enc_model, ids);
    ASSERT_EQ(decode_tokens(dec_model, bytes, ids.size()), ids) << "trial " << trial;
  }
}

TEST(GoldenCdfs, MatchTheRecordedReferenceValues) {
  std::ifstream in(testing::fixtures() / "golden" / "cdf_golden.json");
  ASSERT_TRUE(in);
  const nlohmann::json golden = nlohmann::json::parse(in);
  const ModelSuite& s = fixture_suite();
  const std::uint32_t v = s.autoregressive->image_vocab_size();
  const TokenSequence empty(Vocabulary::image(v));
  std::map<std::string, QuantizedCdf> computed;
  computed.emplace("ar/empty-prefix/position-0", next_cdf_ar(s.autoregressive, empty, 0));
  computed.emplace("masked/two-placeholders/position-2",
                   next_cdf_masked(s.masked, MaskedSequence(Vocabulary::image(v), {v, v, 0}, BinaryMask({1, 1, 0})), 2));
  computed.emplace("textcond/text-1-2-3/position-0",
                   next_cdf_textcond(s.text_conditional,
                                     TokenSequence(Vocabulary::text(s.text_conditional->text_vocab_size()), {1, 2, 3}),
                                     empty, 0));
  ASSERT_EQ(golden.size(), computed.size());
  for (const auto& entry : golden) {
    const std::string name = entry.at("name");
    ASSERT_TRUE(computed.count(name)) << name;
    EXPECT_EQ(entry.at("cum").get<std::vector<std::uint32_t>>(), cum_of(computed.at(name))) << name;
  }
}

TEST(TransformerModel, ArRejectsOtherModesAndFullContexts) {
  const ModelSuite& s = fixture_suite();
  const std::uint32_t v = s.autoregressive->image_vocab_size();
  const TokenSequence empty(Vocabulary::image(v));
  EXPECT_TOKENLINK_ERROR(next_cdf_ar(s.masked, empty, 0), ErrorCode::kModeMismatch);
  EXPECT_TOKENLINK_ERROR(next_cdf_textcond(s.autoregressive, TokenSequence(Vocabulary::text(32)), empty, 0),
                         ErrorCode::kModeMismatch);
  const TokenSequence full(Vocabulary::image(v), std::vector<TokenId>(s.autoregressive->arch().max_context, 1));
  EXPECT_TOKENLINK_ERROR(next_cdf_ar(s.autoregressive, full, full.size()), ErrorCode::kContextOverflow);
  const TokenSequence last(Vocabulary::image(v), std::vector<TokenId>(s.autoregressive->arch().max_context - 1, 1));
  expect_valid(next_cdf_ar(s.autoregressive, last, last.size()));
}

TEST(TransformerModel, MaskedRefusesMaskedPositions) {
  const ModelSuite& s = fixture_suite();
  const std::uint32_t v = s.masked->image_vocab_size();
  const MaskedSequence ctx(Vocabulary::image(v), {3, v, 4}, BinaryMask({0, 1, 0}));
  EXPECT_TOKENLINK_ERROR(next_cdf_masked(s.masked, ctx, 1), ErrorCode::kCalledOnMaskedPosition);
  expect_valid(next_cdf_masked(s.masked, ctx, 2));
  expect_valid(next_cdf_masked(s.masked, ctx, 3));
}

TEST(TransformerModel, TextConditionalHandlesEmptyTextAndOverflow) {
  const ModelSuite& s = fixture_suite();
  const auto& w = s.text_conditional;
  const Vocabulary iv = Vocabulary::image(w->image_vocab_size());
  const Vocabulary tv = Vocabulary::text(w->text_vocab_size());
  expect_valid(next_cdf_textcond(w, TokenSequence(tv), TokenSequence(iv), 0));
  const TokenSequence long_text(tv, std::vector<TokenId>(w->arch().max_context, 1));
  EXPECT_TOKENLINK_ERROR(next_cdf_textcond(w, long_text, TokenSequence(iv), 0), ErrorCode::kContextOverflow);
}

TEST(TransformerModel, TextConditioningChangesTheDistribution) {
  const ModelSuite& s = fixture_suite();
  const auto& w = s.text_conditional;
  const Vocabulary iv = Vocabulary::image(w->image_vocab_size());
  const Vocabulary tv = Vocabulary::text(w->text_vocab_size());
  const TokenSequence prefix(iv, {1, 2, 3});
  const auto a = next_cdf_textcond(w, TokenSequence(tv, {1, 2, 3}), prefix, 3);
  const auto b = next_cdf_textcond(w, TokenSequence(tv, {7, 9, 20}), prefix, 3);
  EXPECT_NE(cum_of(a), cum_of(b));
}

TEST(TransformerModel, CacheTransparencyAllModes) {
  std::mt19937_64 rng(3);
  const ModelSuite& s = fixture_suite();
  const std::uint32_t v = s.autoregressive->image_vocab_size();
  const Vocabulary iv = Vocabulary::image(v);
  const auto ids = random_ids(rng, 40, v);
  const TokenSequence text(Vocabulary::text(s.text_conditional->text_vocab_size()), random_ids(rng, 6, 32));

  TransformerModel ar(s.autoregressive);
  TransformerModel tc(s.text_conditional, text.ids());
  const auto ar_inc = incremental_cdfs(ar, ids);
  const auto tc_inc = incremental_cdfs(tc, ids);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const TokenSequence prefix(iv, std::vector<TokenId>(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(i)));
    ASSERT_EQ(ar_inc[i], next_cdf_ar(s.autoregressive, prefix, i)) << i;
    ASSERT_EQ(tc_inc[i], next_cdf_textcond(s.text_conditional, text, prefix, i)) << i;
  }

  // Masked: placeholders in context, CDFs requested at unmasked positions.
  const BinaryMask m = random_mask(rng, ids.size(), 0.4);
  const MaskedSequence masked = apply_mask(TokenSequence(iv, ids), m);
  TransformerModel mm(s.masked);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!m[i]) {
      ASSERT_EQ(mm.next_cdf(), next_cdf_masked(s.masked, masked, i)) << i;
    }
    mm.observe(masked.ids()[i]);
  }
}

TEST(TransformerModel, MaskedWithZeroMaskEqualsPlaceholderFreeContext) {
  std::mt19937_64 rng(4);
  const ModelSuite& s = fixture_suite();
  const std::uint32_t v = s.masked->image_vocab_size();
  const TokenSequence seq(Vocabulary::image(v), random_ids(rng, 64, v));
  const BinaryMask zeros = BinaryMask::zeros(seq.size());
  EXPECT_EQ(cross_entropy_bits(ModelKind::kMasked, seq, s.masked, &zeros),
            cross_entropy_bits(ModelKind::kMasked, seq, s.masked));
  const TokenSequence prefix(Vocabulary::image(v), {seq[0], seq[1]});
  EXPECT_EQ(next_cdf_masked(s.masked, prefix, 2),
            next_cdf_masked(s.masked, MaskedSequence(prefix.vocab(), prefix.id_vector(), BinaryMask::zeros(2)), 2));
}

TEST(TransformerModel, AllOnesMaskCostsNothing) {
  const ModelSuite& s = fixture_suite();
  const std::uint32_t v = s.masked->image_vocab_size();
  const TokenSequence seq(Vocabulary::image(v), std::vector<TokenId>(20, 3));
  const BinaryMask ones = BinaryMask::ones(20);
  EXPECT_EQ(cross_entropy_bits(ModelKind::kMasked, seq, s.masked, &ones), 0.0);
}

TEST(TransformerModel, IdenticalWeightsGiveBitIdenticalCdfs) {
  const auto a = testing::fixture_weights("w_ar.umew");
  const auto b = testing::fixture_weights("w_ar.umew");
  std::mt19937_64 rng(5);
  const auto ids = random_ids(rng, 30, a->image_vocab_size());
  TransformerModel ma(a);
  TransformerModel mb(b);
  EXPECT_EQ(incremental_cdfs(ma, ids), incremental_cdfs(mb, ids));
}

TEST(TransformerModel, RandomWeightsAlwaysGiveValidCdfs) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 12; ++trial) {
    const auto mode = static_cast<ModelMode>(trial % 3);
    const std::uint32_t v = 2 + static_cast<std::uint32_t>(uniform_below(rng, 300));
    // Large scales saturate the softmax and lean on the frequency floor.
    const auto w = random_weights(mode, v, rng(), trial % 2 ? 4.0 : 0.3);
    const auto text = mode == ModelMode::kTextConditional ? random_ids(rng, uniform_below(rng, 8), 32)
                                                          : std::vector<TokenId>{};
    TransformerModel model(w, text);
    for (int i = 0; i < 24; ++i) {
      expect_valid(model.next_cdf());
      const bool placeholder = mode == ModelMode::kMasked && uniform_below(rng, 3) == 0;
      model.observe(placeholder ? v : static_cast<TokenId>(uniform_below(rng, v)));
    }
  }
}

TEST(MakeModel, ValidatesWeights) {
  const ModelSuite& s = fixture_suite();
  const std::uint32_t v = s.autoregressive->image_vocab_size();
  EXPECT_TOKENLINK_ERROR(make_model(ModelKind::kAutoregressive, v), ErrorCode::kMissingModel);
  EXPECT_TOKENLINK_ERROR(make_model(ModelKind::kAutoregressive, v, s.masked), ErrorCode::kModeMismatch);
  EXPECT_TOKENLINK_ERROR(make_model(ModelKind::kAutoregressive, v + 1, s.autoregressive),
                         ErrorCode::kVocabularyKindMismatch);
  EXPECT_TOKENLINK_ERROR(make_model(ModelKind::kAutoregressive, v, s.autoregressive, std::vector<TokenId>{1}),
                         ErrorCode::kModeMismatch);
  EXPECT_TOKENLINK_ERROR(make_model(ModelKind::kUniform, 65537), ErrorCode::kVocabTooLarge);
}

class CodingRoundTrip : public ::testing::TestWithParam<ModelKind> {};

TEST_P(CodingRoundTrip, EncodeDecodeAndRate) {
  const ModelKind kind = GetParam();
  const ModelSuite& s = fixture_suite();
  const auto weights = kind == ModelKind::kAutoregressive    ? s.autoregressive
                       : kind == ModelKind::kMasked          ? s.masked
                       : kind == ModelKind::kTextConditional ? s.text_conditional
                                                             : nullptr;
  const std::uint32_t v = s.autoregressive->image_vocab_size();
  std::mt19937_64 rng(7 + static_cast<int>(kind));
  for (int trial = 0; trial < 25; ++trial) {
    const auto ids = random_ids(rng, uniform_below(rng, 80), v);
    const auto text = kind == ModelKind::kTextConditional ? random_ids(rng, uniform_below(rng, 9), 32)
                                                          : std::vector<TokenId>{};
    std::optional<BinaryMask> mask;
    if (kind == ModelKind::kMasked || kind == ModelKind::kAdaptive) mask = random_mask(rng, ids.size(), 0.4);
    const BinaryMask* mp = mask ? &*mask : nullptr;
    auto enc = make_model(kind, v, weights, text);
    auto dec = make_model(kind, v, weights, text);
    auto score = make_model(kind, v, weights, text);
    const Bytes bytes = encode_tokens(*enc, ids, mp, v);
    const auto decoded = decode_tokens(*dec, bytes, ids.size(), mp, v);
    const auto expected = mp ? extract_valid(TokenSequence(Vocabulary::image(v), ids), *mp).id_vector() : ids;
    ASSERT_EQ(decoded, expected);
    const double ce = cross_entropy_bits(*score, ids, mp, v);
    EXPECT_LE(8.0 * bytes.size(), ce + 64.0);
    EXPECT_GE(8.0 * bytes.size(), ce - 64.0);
  }
}

INSTANTIATE_TEST_SUITE_P(AllModes, CodingRoundTrip,
                         ::testing::Values(ModelKind::kUniform, ModelKind::kAdaptive, ModelKind::kAutoregressive,
                                           ModelKind::kMasked, ModelKind::kTextConditional),
                         [](const auto& info) {
                           std::string name(model_kind_name(info.param));
                           std::erase(name, '-');
                           return name;
                         });

TEST(InContextCoding, RoundTripAndRate) {
  const ModelSuite& s = fixture_suite();
  const std::uint32_t v = s.text_conditional->image_vocab_size();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ids = random_ids(rng, 1 + uniform_below(rng, 64), v);
    const auto text = random_ids(rng, uniform_below(rng, 8), 32);
    const BinaryMask coded = random_mask(rng, ids.size(), uniform_unit(rng));
    auto enc = make_model(ModelKind::kTextConditional, v, s.text_conditional, text);
    auto dec = make_model(ModelKind::kTextConditional, v, s.text_conditional, text);
    auto score = make_model(ModelKind::kTextConditional, v, s.text_conditional, text);
    const Bytes bytes = encode_in_context(*enc, ids, coded);
    std::vector<TokenId> known = ids;
    for (std::size_t i = 0; i < known.size(); ++i) {
      if (coded[i]) known[i] = 0;
    }
    ASSERT_EQ(decode_in_context(*dec, bytes, known, coded), ids);
    const double ce = cross_entropy_in_context(*score, ids, coded);
    EXPECT_LE(8.0 * bytes.size(), ce + 64.0);
    EXPECT_GE(8.0 * bytes.size(), ce - 64.0);
  }
}

TEST(InContextCoding, AllCodedEqualsPlainCoding) {
  const ModelSuite& s = fixture_suite();
  const std::uint32_t v = s.autoregressive->image_vocab_size();
  std::mt19937_64 rng(9);
  const auto ids = random_ids(rng, 50, v);
  TransformerModel a(s.autoregressive);
  TransformerModel b(s.autoregressive);
  EXPECT_EQ(encode_in_context(a, ids, BinaryMask::ones(ids.size())), encode_tokens(b, ids));
}

TEST(EncodeTokens, MaskLengthMismatch) {
  UniformModel m(4);
  const BinaryMask mask = BinaryMask::zeros(3);
  EXPECT_TOKENLINK_ERROR(encode_tokens(m, std::vector<TokenId>{1, 2}, &mask), ErrorCode::kLengthMismatch);
  EXPECT_TOKENLINK_ERROR(encode_in_context(m, std::vector<TokenId>{1, 2}, mask), ErrorCode::kLengthMismatch);
}

}  // namespace
}  // namespace tokenlink
