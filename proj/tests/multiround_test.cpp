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

#include "tokenlink/multiround.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace tokenlink {
namespace {

const std::vector<GrayImage>& images() {
  static const std::vector<GrayImage> imgs = load_fixture_images(testing::fixtures() / "images");
  return imgs;
}

const SimulationContext& context() {
  static const SimulationContext ctx = make_simulation_context(images(), 0);
  return ctx;
}

std::vector<RoundRecord> rows_of(const MultiroundReport& r, Pipeline p) {
  std::vector<RoundRecord> out;
  for (const RoundRecord& row : r.rows) {
    if (row.pipeline == p) out.push_back(row);
  }
  return out;
}

TEST(Multiround, FixtureImagesLoad) {
  ASSERT_EQ(images().size(), 5u);
  EXPECT_EQ(images()[0].width(), 64u);
}

class MultiroundTask : public ::testing::TestWithParam<Task> {};

TEST_P(MultiroundTask, TokenRoundsHoldPixelRoundsDecay) {
  MultiroundConfig cfg;
  cfg.task = GetParam();
  cfg.rounds = 5;
  cfg.seed = 3;
  const MultiroundReport report = run_multiround(cfg, images()[1], context());
  const auto token = rows_of(report, Pipeline::kToken);
  const auto pixel = rows_of(report, Pipeline::kPixel);
  ASSERT_EQ(token.size(), 5u);
  ASSERT_EQ(pixel.size(), 5u);
  for (std::size_t r = 1; r < 5; ++r) {
    EXPECT_EQ(token[r].psnr_db, token[0].psnr_db) << "round " << r + 1;
    EXPECT_EQ(token[r].reconstruction, token[0].reconstruction) << "round " << r + 1;
    EXPECT_LE(pixel[r].psnr_db, pixel[r - 1].psnr_db) << "round " << r + 1;
    EXPECT_EQ(token[r].round, r + 1);
  }
  EXPECT_LT(pixel[4].psnr_db, pixel[0].psnr_db);
  for (const RoundRecord& row : report.rows) EXPECT_GT(row.bpp, 0.0);
}

INSTANTIATE_TEST_SUITE_P(AllTasks, MultiroundTask,
                         ::testing::Values(Task::kTextToImage, Task::kInpaint, Task::kOutpaint, Task::kVqa),
                         [](const auto& info) { return std::string(task_name(info.param)); });

TEST(Multiround, SingleRound) {
  MultiroundConfig cfg;
  cfg.rounds = 1;
  cfg.pixel_pipeline = false;
  const MultiroundReport report = run_multiround(cfg, images()[0], context());
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_EQ(report.rows[0].round, 1u);
}

TEST(Multiround, Deterministic) {
  MultiroundConfig cfg;
  cfg.rounds = 3;
  cfg.seed = 9;
  EXPECT_EQ(run_multiround(cfg, images()[2], context()).to_csv(),
            run_multiround(cfg, images()[2], context()).to_csv());
}

TEST(Multiround, CsvShape) {
  MultiroundConfig cfg;
  cfg.rounds = 2;
  const std::string csv = run_multiround(cfg, images()[0], context()).to_csv();
  EXPECT_EQ(csv.rfind("round,pipeline,bpp,psnr_db\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(Multiround, Errors) {
  MultiroundConfig cfg;
  cfg.rounds = 0;
  EXPECT_TOKENLINK_ERROR(run_multiround(cfg, images()[0], context()), ErrorCode::kInvalidArgument);
  cfg.rounds = 1;
  EXPECT_TOKENLINK_ERROR(run_multiround(cfg, GrayImage::filled(6, 8, 0), context()), ErrorCode::kBadDimensions);
}

TEST(Multiround, SimulationMaskIsAContiguousBlock) {
  const BinaryMask m = simulation_mask(16, 16, 4);
  EXPECT_EQ(m.ones_count(), 100u);
  EXPECT_EQ(simulation_mask(16, 16, 4), m);
}

}  // namespace
}  // namespace tokenlink
