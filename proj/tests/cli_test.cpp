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

#include "cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"
#include "tokenlink/bytes.hpp"
#include "tokenlink/token_file.hpp"

namespace tokenlink {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> weight_flags() {
  std::vector<std::string> flags;
  for (const char* name : {"w_ar.umew", "w_masked.umew", "w_textcond.umew"}) {
    flags.push_back("--weights");
    flags.push_back((testing::fixtures() / "weights" / name).string());
  }
  return flags;
}

std::vector<std::string> operator+(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const fs::path kGolden = testing::fixtures() / "golden";

TEST(Cli, EncodeDecodeRoundTripThroughFiles) {
  testing::TempDir dir("cli-roundtrip");
  const std::string up = (dir / "up.umic").string();
  const std::string down = (dir / "down.umic").string();
  Outcome o = run_cli(std::vector<std::string>{"encode", "--task", "inpaint", "--text",
                                               (kGolden / "inpaint_text.umtk").string(), "--image",
                                               (kGolden / "inpaint_image.umtk").string(), "--mask",
                                               (kGolden / "inpaint_mask.umtk").string(), "-o", up} +
                      weight_flags());
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  EXPECT_NE(o.out.find("bpp"), std::string::npos);
  EXPECT_EQ(read_file(up), read_file(kGolden / "inpaint_up.umic"));

  o = run_cli(std::vector<std::string>{"decode", "-i", up, "--out-dir", (dir / "cloud").string()} + weight_flags());
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  EXPECT_EQ(load_tokens(dir / "cloud" / "text.umtk", Modality::kText),
            load_tokens(kGolden / "inpaint_text.umtk", Modality::kText));
  EXPECT_EQ(load_mask(dir / "cloud" / "mask.umtk"), load_mask(kGolden / "inpaint_mask.umtk"));

  o = run_cli(std::vector<std::string>{"encode", "--task", "inpaint", "--uplink", up, "--generated",
                                       (kGolden / "inpaint_generated.umtk").string(), "-o", down} +
              weight_flags());
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  EXPECT_EQ(read_file(down), read_file(kGolden / "inpaint_down.umic"));

  o = run_cli(std::vector<std::string>{"decode", "-i", down, "--uplink", up, "--out-dir", (dir / "edge").string()} +
              weight_flags());
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  EXPECT_EQ(load_tokens(dir / "edge" / "result.umtk", Modality::kImage),
            load_tokens(kGolden / "inpaint_result.umtk", Modality::kImage));
}

TEST(Cli, TruncatedStreamExitsThree) {
  testing::TempDir dir("cli-truncated");
  Bytes b = read_file(kGolden / "vqa_up.umic");
  b.resize(b.size() - 3);
  write_file(dir / "cut.umic", b);
  const Outcome o = run_cli(std::vector<std::string>{"decode", "-i", (dir / "cut.umic").string(), "--out-dir",
                                                     (dir / "out").string()} +
                            weight_flags());
  EXPECT_EQ(o.code, cli::kExitCorruptStream);
  EXPECT_NE(o.err.find("Truncated"), std::string::npos) << o.err;
  EXPECT_EQ(run_cli({"inspect", (dir / "cut.umic").string()}).code, cli::kExitCorruptStream);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run_cli({"encode", "--bogus"}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({"simulate", "--rounds", "0"}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({"decode", "-i", "x.umic", "--weights", "/nonexistent/w.umew"}).code, cli::kExitInputError);
  EXPECT_EQ(run_cli({"decode", "-i", "/nonexistent/x.umic"}).code, cli::kExitInputError);
  testing::TempDir dir("cli-input");
  EXPECT_EQ(run_cli({"encode", "--task", "paint", "-o", (dir / "o").string()}).code, cli::kExitInputError);
}

TEST(Cli, HelpExitsZero) {
  const Outcome o = run_cli({"--help"});
  EXPECT_EQ(o.code, cli::kExitOk);
  EXPECT_NE(o.out.find("simulate"), std::string::npos);
}

TEST(Cli, SimulateWritesOneRowPerRoundAndPipeline) {
  const Outcome o = run_cli({"simulate", "--task", "inpaint", "--rounds", "5", "--seed", "2"});
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  EXPECT_EQ(std::count(o.out.begin(), o.out.end(), '\n'), 11);
  EXPECT_EQ(run_cli({"simulate", "--task", "inpaint", "--rounds", "5", "--seed", "2"}).out, o.out);
}

TEST(Cli, InspectAnnotatesFrames) {
  const Outcome o = run_cli({"inspect", (kGolden / "inpaint_up.umic").string()});
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  EXPECT_NE(o.out.find("frame 0: mask-bits"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("total "), std::string::npos);
}

TEST(Cli, EncodeIsDeterministic) {
  testing::TempDir dir("cli-det");
  for (const char* name : {"a.umic", "b.umic"}) {
    ASSERT_EQ(run_cli(std::vector<std::string>{"encode", "--task", "vqa", "--text",
                                               (kGolden / "vqa_text.umtk").string(), "--image",
                                               (kGolden / "vqa_image.umtk").string(), "-o", (dir / name).string()} +
                      weight_flags())
                  .code,
              cli::kExitOk);
  }
  EXPECT_EQ(read_file(dir / "a.umic"), read_file(dir / "b.umic"));
  EXPECT_EQ(read_file(dir / "a.umic"), read_file(kGolden / "vqa_up.umic"));
}

}  // namespace
}  // namespace tokenlink
