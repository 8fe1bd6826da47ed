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

#include "tokenlink/protocol.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tokenlink/bytes.hpp"
#include "tokenlink/generator.hpp"
#include "tokenlink/token_file.hpp"

namespace tokenlink {
namespace {

using testing::fixture_suite;
using testing::random_ids;
using testing::random_mask;

constexpr Task kTasks[] = {Task::kTextToImage, Task::kInpaint, Task::kOutpaint, Task::kVqa};

/// Inputs a task needs, drawn at random over the fixture vocabularies.
EdgeInputs random_inputs(std::mt19937_64& rng, Task task, std::size_t max_image = 64) {
  const ModelSuite& s = fixture_suite();
  const std::uint32_t tv = s.text_conditional->text_vocab_size();
  const std::uint32_t iv = s.autoregressive->image_vocab_size();
  EdgeInputs in;
  in.text = TokenSequence(Vocabulary::text(tv), random_ids(rng, uniform_below(rng, 12), tv));
  if (task != Task::kTextToImage) {
    const std::size_t m = 1 + uniform_below(rng, max_image);
    in.image = TokenSequence(Vocabulary::image(iv), random_ids(rng, m, iv));
    if (task == Task::kInpaint) in.mask = random_mask(rng, m, uniform_unit(rng));
  }
  return in;
}

/// What the generator would send back for `contents`.
TokenSequence cloud_output(std::mt19937_64& rng, Task task, const UplinkContents& contents,
                           const CloudSession& cloud) {
  const std::uint32_t iv = fixture_suite().autoregressive->image_vocab_size();
  switch (task) {
    case Task::kTextToImage:
      return TokenSequence(Vocabulary::image(iv), random_ids(rng, uniform_below(rng, 65), iv));
    case Task::kVqa:
      return TokenSequence(contents.text->vocab(), random_ids(rng, kAnswerLength, contents.text->vocab().size()));
    default:
      return TokenSequence(Vocabulary::image(iv), random_ids(rng, *cloud.expected_downlink_tokens(), iv));
  }
}

struct Exchange {
  EdgeInputs inputs;
  Bytes up;
  UplinkContents contents;
  TokenSequence output;
  Bytes down;
  TokenSequence result;
};

Exchange run_exchange(std::mt19937_64& rng, Task task, const ModelSuite& edge_models,
                      const ModelSuite& cloud_models) {
  Exchange x{random_inputs(rng, task), {}, {}, TokenSequence(Vocabulary::text(2)), {}, TokenSequence(Vocabulary::text(2))};
  EdgeSession edge(task, edge_models);
  CloudSession cloud(task, cloud_models);
  x.up = edge.encode_uplink(x.inputs);
  x.contents = cloud.decode_uplink(x.up);
  x.output = cloud_output(rng, task, x.contents, cloud);
  x.down = cloud.encode_downlink(x.output);
  x.result = edge.decode_downlink(x.down);
  EXPECT_EQ(edge.state(), EdgeState::kDone);
  EXPECT_EQ(cloud.state(), CloudState::kDone);
  return x;
}

void expect_lossless(const Exchange& x, Task task) {
  ASSERT_EQ(x.contents.text, x.inputs.text);
  switch (task) {
    case Task::kTextToImage:
      EXPECT_FALSE(x.contents.image);
      EXPECT_EQ(x.result, x.output);
      break;
    case Task::kInpaint: {
      ASSERT_TRUE(x.contents.masked_image);
      EXPECT_EQ(*x.contents.masked_image, apply_mask(*x.inputs.image, *x.inputs.mask));
      EXPECT_EQ(x.result, merge_generated(*x.contents.masked_image, x.output));
      break;
    }
    case Task::kOutpaint: {
      ASSERT_EQ(x.contents.image, x.inputs.image);
      std::vector<TokenId> joined = x.inputs.image->id_vector();
      joined.insert(joined.end(), x.output.ids().begin(), x.output.ids().end());
      EXPECT_EQ(x.result.id_vector(), joined);
      break;
    }
    case Task::kVqa:
      EXPECT_EQ(x.contents.image, x.inputs.image);
      EXPECT_EQ(x.result, x.output);
      break;
  }
}

TEST(Plan, MatchesTheTaskTable) {
  using K = PayloadKind;
  using W = WireModel;
  const auto t2i = plan_for_task(Task::kTextToImage);
  EXPECT_EQ(t2i.uplink, (std::vector<PlanStep>{{K::kText, W::kByteCompressor}}));
  EXPECT_EQ(t2i.downlink, (std::vector<PlanStep>{{K::kImageFull, W::kTextConditional}}));
  const auto inpaint = plan_for_task(Task::kInpaint);
  EXPECT_EQ(inpaint.uplink, (std::vector<PlanStep>{{K::kMaskBits, W::kRawBits},
                                                   {K::kImageUnmasked, W::kMasked},
                                                   {K::kText, W::kByteCompressor}}));
  EXPECT_EQ(inpaint.downlink, (std::vector<PlanStep>{{K::kImageFull, W::kTextConditional}}));
  const auto outpaint = plan_for_task(Task::kOutpaint);
  EXPECT_EQ(outpaint.uplink,
            (std::vector<PlanStep>{{K::kImageFull, W::kTextConditional}, {K::kText, W::kByteCompressor}}));
  EXPECT_EQ(outpaint.downlink, (std::vector<PlanStep>{{K::kImageFull, W::kTextConditional}}));
  const auto vqa = plan_for_task(Task::kVqa);
  EXPECT_EQ(vqa.uplink,
            (std::vector<PlanStep>{{K::kImageFull, W::kAutoregressive}, {K::kText, W::kByteCompressor}}));
  EXPECT_EQ(vqa.downlink, (std::vector<PlanStep>{{K::kAnswerText, W::kByteCompressor}}));
  EXPECT_TOKENLINK_ERROR(plan_for_task(static_cast<Task>(4)), ErrorCode::kUnknownTask);
}

TEST(Protocol, InpaintFrameSizesAtPaperScale) {
  // Vocabulary 8192 has no fixture weights, so image frames fall back to
  // uniform coding; frame sizes depend only on the mask.
  std::mt19937_64 rng(1);
  const TokenSequence image(Vocabulary::image(8192), random_ids(rng, 1024, 8192));
  std::vector<double> scores(1024);
  for (double& s : scores) s = uniform_unit(rng);
  const BinaryMask mask = rate_control_drop(image, 0.4, scores);
  ASSERT_EQ(mask.ones_count(), 409u);
  EdgeSession edge(Task::kInpaint, {});
  CloudSession cloud(Task::kInpaint, {});
  const Bytes up = edge.encode_uplink({TokenSequence(Vocabulary::text(50257), {464, 3797}), image, mask});
  const Message m = read_message(up);
  ASSERT_EQ(m.frames.size(), 3u);
  EXPECT_EQ(m.frames[0].bytes.size(), 128u);
  EXPECT_EQ(m.frames[1].token_count, 615u);
  EXPECT_EQ(m.frames[1].model, WireModel::kUniform);
  const UplinkContents c = cloud.decode_uplink(up);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    EXPECT_EQ(c.masked_image->ids()[i] == 8192u, mask[i]) << i;
  }
  ASSERT_EQ(cloud.expected_downlink_tokens(), 409u);
  const Bytes down = cloud.encode_downlink(TokenSequence(Vocabulary::image(8192), random_ids(rng, 409, 8192)));
  EXPECT_EQ(read_message(down).frames.at(0).token_count, 409u);
  EXPECT_EQ(edge.decode_downlink(down).size(), 1024u);
}

TEST(Protocol, OutpaintDownlinkCarriesOnlyTheExtension) {
  std::mt19937_64 rng(2);
  const TokenSequence image(Vocabulary::image(8192), random_ids(rng, 1024, 8192));
  EdgeSession edge(Task::kOutpaint, {});
  CloudSession cloud(Task::kOutpaint, {});
  cloud.decode_uplink(edge.encode_uplink({TokenSequence(Vocabulary::text(100), {1}), image, std::nullopt}));
  ASSERT_EQ(cloud.expected_downlink_tokens(), 512u);
  const TokenSequence ext(Vocabulary::image(8192), random_ids(rng, 512, 8192));
  const Bytes down = cloud.encode_downlink(ext);
  EXPECT_EQ(read_message(down).frames.at(0).token_count, 512u);
  const TokenSequence out = edge.decode_downlink(down);
  EXPECT_EQ(out.size(), 1536u);
  EXPECT_TOKENLINK_ERROR(
      {
        CloudSession c2(Task::kOutpaint, {});
        c2.decode_uplink(EdgeSession(Task::kOutpaint, {}).encode_uplink(
            {TokenSequence(Vocabulary::text(100), {1}), image, std::nullopt}));
        c2.encode_downlink(TokenSequence(Vocabulary::image(8192), random_ids(rng, 511, 8192)));
      },
      ErrorCode::kLengthMismatch);
}

TEST(Protocol, OutpaintExtensionOption) {
  std::mt19937_64 rng(3);
  const TokenSequence image(Vocabulary::image(16), random_ids(rng, 8, 16));
  SessionOptions opts;
  opts.outpaint_extension = 3;
  EdgeSession edge(Task::kOutpaint, fixture_suite(), opts);
  CloudSession cloud(Task::kOutpaint, fixture_suite(), opts);
  cloud.decode_uplink(edge.encode_uplink({TokenSequence(Vocabulary::text(32), {1}), image, std::nullopt}));
  const TokenSequence ext(Vocabulary::image(16), {4, 5, 6});
  const TokenSequence out = edge.decode_downlink(cloud.encode_downlink(ext));
  EXPECT_EQ(out.size(), 11u);
}

TEST(Protocol, ModalityErrors) {
  const TokenSequence text(Vocabulary::text(32), {1, 2});
  const TokenSequence image(Vocabulary::image(16), {1, 2, 3, 4});
  EXPECT_TOKENLINK_ERROR(EdgeSession(Task::kTextToImage, {}).encode_uplink({text, image, std::nullopt}),
                         ErrorCode::kExtraModality);
  EXPECT_TOKENLINK_ERROR(EdgeSession(Task::kInpaint, {}).encode_uplink({text, image, std::nullopt}),
                         ErrorCode::kMissingModality);
  EXPECT_TOKENLINK_ERROR(EdgeSession(Task::kVqa, {}).encode_uplink({text, std::nullopt, std::nullopt}),
                         ErrorCode::kMissingModality);
  EXPECT_TOKENLINK_ERROR(EdgeSession(Task::kVqa, {}).encode_uplink({std::nullopt, image, std::nullopt}),
                         ErrorCode::kMissingModality);
  EXPECT_TOKENLINK_ERROR(EdgeSession(Task::kOutpaint, {}).encode_uplink({text, image, BinaryMask::zeros(4)}),
                         ErrorCode::kExtraModality);
  EXPECT_TOKENLINK_ERROR(EdgeSession(Task::kInpaint, {}).encode_uplink({text, image, BinaryMask::zeros(3)}),
                         ErrorCode::kLengthMismatch);
  EXPECT_TOKENLINK_ERROR(EdgeSession(Task::kVqa, {}).encode_uplink({image, image, std::nullopt}),
                         ErrorCode::kVocabularyKindMismatch);
}

TEST(Protocol, StateMachine) {
  const TokenSequence text(Vocabulary::text(32), {1, 2});
  EdgeSession edge(Task::kTextToImage, {});
  EXPECT_TOKENLINK_ERROR(edge.decode_downlink(Bytes{}), ErrorCode::kStateError);
  const Bytes up = edge.encode_uplink({text, std::nullopt, std::nullopt});
  EXPECT_TOKENLINK_ERROR(edge.encode_uplink({text, std::nullopt, std::nullopt}), ErrorCode::kStateError);

  CloudSession cloud(Task::kTextToImage, {});
  EXPECT_TOKENLINK_ERROR(cloud.encode_downlink(TokenSequence(Vocabulary::image(16), {1})), ErrorCode::kStateError);
  EXPECT_TOKENLINK_ERROR(cloud.uplink(), ErrorCode::kStateError);
  cloud.decode_uplink(up);
  EXPECT_TOKENLINK_ERROR(cloud.decode_uplink(up), ErrorCode::kStateError);
  const Bytes down = cloud.encode_downlink(TokenSequence(Vocabulary::image(16), {1, 2, 3}));
  EXPECT_TOKENLINK_ERROR(cloud.encode_downlink(TokenSequence(Vocabulary::image(16), {1})), ErrorCode::kStateError);
  edge.decode_downlink(down);
  EXPECT_TOKENLINK_ERROR(edge.decode_downlink(down), ErrorCode::kStateError);
}

TEST(Protocol, DirectionAndTaskMismatch) {
  const TokenSequence text(Vocabulary::text(32), {1, 2});
  EdgeSession edge(Task::kTextToImage, {});
  CloudSession cloud(Task::kTextToImage, {});
  const Bytes up = edge.encode_uplink({text, std::nullopt, std::nullopt});
  cloud.decode_uplink(up);
  const Bytes down = cloud.encode_downlink(TokenSequence(Vocabulary::image(16), {1, 2, 3}));
  EXPECT_TOKENLINK_ERROR(CloudSession(Task::kTextToImage, {}).decode_uplink(down), ErrorCode::kDirectionMismatch);
  EXPECT_TOKENLINK_ERROR(edge.decode_downlink(up), ErrorCode::kDirectionMismatch);
  EXPECT_TOKENLINK_ERROR(CloudSession(Task::kVqa, {}).decode_uplink(up), ErrorCode::kTaskMismatch);
}

TEST(Protocol, StrictFrameMatching) {
  const TokenSequence text(Vocabulary::text(32), {1, 2});
  Message m{{Task::kTextToImage, Direction::kUplink}, {}};
  EXPECT_TOKENLINK_ERROR(CloudSession(Task::kTextToImage, {}).decode_uplink(write_message(m)),
                         ErrorCode::kMissingModality);
  Message good = read_message(EdgeSession(Task::kTextToImage, {}).encode_uplink({text, std::nullopt, std::nullopt}));
  Message extra = good;
  extra.frames.push_back(good.frames[0]);
  EXPECT_TOKENLINK_ERROR(CloudSession(Task::kTextToImage, {}).decode_uplink(write_message(extra)),
                         ErrorCode::kExtraModality);
  Message answer = good;
  answer.frames[0].kind = PayloadKind::kAnswerText;
  EXPECT_TOKENLINK_ERROR(CloudSession(Task::kTextToImage, {}).decode_uplink(write_message(answer)),
                         ErrorCode::kMissingModality);
}

TEST(Protocol, VqaImageUsesAutoregressiveModel) {
  std::mt19937_64 rng(4);
  const EdgeInputs in = random_inputs(rng, Task::kVqa);
  const Message m = read_message(EdgeSession(Task::kVqa, fixture_suite()).encode_uplink(in));
  EXPECT_EQ(m.frames.at(0).model, WireModel::kAutoregressive);
}

TEST(Protocol, FallsBackToUniformWhenModelsCannotServe) {
  std::mt19937_64 rng(5);
  const EdgeInputs in = random_inputs(rng, Task::kVqa);
  // No weights at all.
  EXPECT_EQ(read_message(EdgeSession(Task::kVqa, {}).encode_uplink(in)).frames.at(0).model, WireModel::kUniform);
  // Forced.
  ModelSuite forced = fixture_suite();
  forced.force_uniform = true;
  EXPECT_EQ(read_message(EdgeSession(Task::kVqa, forced).encode_uplink(in)).frames.at(0).model,
            WireModel::kUniform);
  // Vocabulary the weights do not cover.
  EdgeInputs big = in;
  big.image = TokenSequence(Vocabulary::image(64), random_ids(rng, 10, 64));
  EXPECT_EQ(read_message(EdgeSession(Task::kVqa, fixture_suite()).encode_uplink(big)).frames.at(0).model,
            WireModel::kUniform);
  // Sequence longer than the model context.
  EdgeInputs long_image = in;
  long_image.image = TokenSequence(Vocabulary::image(16), random_ids(rng, 1200, 16));
  EXPECT_EQ(read_message(EdgeSession(Task::kVqa, fixture_suite()).encode_uplink(long_image)).frames.at(0).model,
            WireModel::kUniform);
}

TEST(Protocol, DecoderWithoutTheWeightsReportsMissingModel) {
  std::mt19937_64 rng(6);
  const Bytes up = EdgeSession(Task::kVqa, fixture_suite()).encode_uplink(random_inputs(rng, Task::kVqa));
  EXPECT_TOKENLINK_ERROR(CloudSession(Task::kVqa, {}).decode_uplink(up), ErrorCode::kMissingModel);
}

TEST(Protocol, DownlinkSubsetFrameHoldsExactlyTheGeneratedCount) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Exchange x = run_exchange(rng, Task::kInpaint, fixture_suite(), fixture_suite());
    EXPECT_EQ(read_message(x.down).frames.at(0).token_count, x.inputs.mask->ones_count());
    const Exchange y = run_exchange(rng, Task::kOutpaint, fixture_suite(), fixture_suite());
    EXPECT_EQ(read_message(y.down).frames.at(0).token_count, y.inputs.image->size() / 2);
  }
}

TEST(ProtocolProperty, EndToEndLosslessThousandTrialsPerTask) {
  for (Task task : kTasks) {
    std::mt19937_64 rng(100 + static_cast<int>(task));
    for (int trial = 0; trial < 1000; ++trial) {
      const Exchange x = run_exchange(rng, task, fixture_suite(), fixture_suite());
      expect_lossless(x, task);
      if (::testing::Test::HasFailure()) FAIL() << task_name(task) << " trial " << trial;
    }
  }
}

TEST(ProtocolGolden, StreamsReproduceAndDecode) {
  const ModelSuite& s = fixture_suite();
  const auto dir = testing::fixtures() / "golden";
  for (Task task : kTasks) {
    const std::string p = std::string(task_name(task)) + "_";
    EdgeInputs in;
    in.text = load_tokens(dir / (p + "text.umtk"), Modality::kText);
    if (task != Task::kTextToImage) in.image = load_tokens(dir / (p + "image.umtk"), Modality::kImage);
    if (task == Task::kInpaint) in.mask = load_mask(dir / (p + "mask.umtk"));
    const Modality out_kind = task == Task::kVqa ? Modality::kText : Modality::kImage;
    const TokenSequence generated = load_tokens(dir / (p + "generated.umtk"), out_kind);
    const TokenSequence result = load_tokens(dir / (p + "result.umtk"), out_kind);
    const Bytes up = read_file(dir / (p + "up.umic"));
    const Bytes down = read_file(dir / (p + "down.umic"));

    EdgeSession edge(task, s);
    EXPECT_EQ(edge.encode_uplink(in), up) << p;
    CloudSession cloud(task, s);
    const UplinkContents c = cloud.decode_uplink(up);
    EXPECT_EQ(c.text, in.text);
    EXPECT_EQ(c.task_token, static_cast<std::uint8_t>(task));
    // The recorded generation is what the mock generator makes of the uplink.
    GenerationParams params;
    params.image_tokens = 64;
    params.image_vocab = s.autoregressive->image_vocab_size();
    EXPECT_EQ(mock_cloud_generate(MockGenerator(7), task, c, params), generated) << p;
    EXPECT_EQ(cloud.encode_downlink(generated), down) << p;
    EXPECT_EQ(edge.decode_downlink(down), result) << p;
  }
}

TEST(RateControl, Examples) {
  const TokenSequence u(Vocabulary::image(16), {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const std::vector<double> scores{9, 1, 8, 2, 7, 3, 6, 4, 5, 0};
  EXPECT_EQ(rate_control_drop(u, 0.3, scores), BinaryMask({0, 1, 0, 1, 0, 0, 0, 0, 0, 1}));
  EXPECT_EQ(rate_control_drop(u, 0.0, scores), BinaryMask::zeros(10));
  EXPECT_EQ(rate_control_drop(u, 1.0, scores), BinaryMask::ones(10));
}

TEST(RateControl, TiesGoToTheLowerIndex) {
  const TokenSequence u(Vocabulary::image(16), {0, 0, 0, 0});
  EXPECT_EQ(rate_control_drop(u, 0.5, std::vector<double>{1, 1, 1, 1}), BinaryMask({1, 1, 0, 0}));
}

TEST(RateControl, SortOracle) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = uniform_below(rng, 100);
    const TokenSequence u(Vocabulary::image(16), random_ids(rng, m, 16));
    std::vector<double> scores(m);
    for (double& s : scores) s = static_cast<double>(uniform_below(rng, 10));
    const double ratio = uniform_unit(rng);
    const std::size_t k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(m) + 1e-9));
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < m; ++i) ranked.emplace_back(scores[i], i);
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::uint8_t> bits(m, 0);
    for (std::size_t i = 0; i < k; ++i) bits[ranked[i].second] = 1;
    EXPECT_EQ(rate_control_drop(u, ratio, scores), BinaryMask(bits));
  }
}

TEST(RateControl, Errors) {
  const TokenSequence u(Vocabulary::image(16), {0, 1, 2});
  EXPECT_TOKENLINK_ERROR(rate_control_drop(u, 0.5, std::vector<double>{1, 2}), ErrorCode::kLengthMismatch);
  EXPECT_TOKENLINK_ERROR(rate_control_drop(u, 1.5, std::vector<double>{1, 2, 3}), ErrorCode::kInvalidArgument);
}

TEST(RateControl, UplinkBytesNonIncreasingInRatio) {
  const ModelSuite& s = fixture_suite();
  const auto texts = load_token_corpus(testing::fixtures() / "corpus" / "heldout.text.umtk", Modality::kText);
  const auto images = load_token_corpus(testing::fixtures() / "corpus" / "heldout.image.umtk", Modality::kImage);
  for (std::size_t i = 0; i < 8; ++i) {
    std::vector<double> scores(images[i].size());
    for (std::size_t k = 0; k < scores.size(); ++k) scores[k] = static_cast<double>(splitmix64(k + 1000 * i) >> 11);
    std::size_t previous = SIZE_MAX;
    for (int step = 0; step <= 10; ++step) {
      const BinaryMask mask = rate_control_drop(images[i], step / 10.0, scores);
      const std::size_t size = EdgeSession(Task::kInpaint, s).encode_uplink({texts[i], images[i], mask}).size();
      EXPECT_LE(size, previous) << "record " << i << " ratio " << step / 10.0;
      previous = size;
    }
  }
}

}  // namespace
}  // namespace tokenlink
