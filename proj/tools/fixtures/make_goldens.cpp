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

// Regenerates the frozen fixtures the test suite compares against: scene
// images, golden CDFs from the reference forward pass, and one uplink and
// one downlink message per task. Run only when a format change is intended.
//
//   make_goldens <fixture-root>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "tokenlink/generator.hpp"
#include "tokenlink/image.hpp"
#include "tokenlink/protocol.hpp"
#include "tokenlink/rng.hpp"
#include "tokenlink/token_file.hpp"
#include "tokenlink/transformer.hpp"
#include "tokenlink/weights.hpp"

namespace fs = std::filesystem;
using namespace tokenlink;

namespace {

constexpr std::uint64_t kGeneratorSeed = 7;
constexpr std::uint32_t kSceneCount = 5;

std::shared_ptr<const EntropyModelWeights> load(const fs::path& p) {
  return std::make_shared<const EntropyModelWeights>(load_weights(p));
}

nlohmann::json cdf_entry(const std::string& name, const QuantizedCdf& cdf) {
  std::vector<std::uint32_t> cum;
  for (std::uint32_t s = 0; s <= cdf.alphabet_size(); ++s) cum.push_back(s == 0 ? 0 : cdf.high(s - 1));
  return {{"name", name}, {"cum", cum}};
}

/// The inpainting mask of the golden flow: 40% of positions, lowest hashed
/// scores first.
BinaryMask golden_mask(const TokenSequence& image) {
  std::vector<double> scores(image.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = static_cast<double>(splitmix64(i) >> 11);
  }
  return rate_control_drop(image, 0.4, scores);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_goldens <fixture-root>\n";
    return 2;
  }
  const fs::path root = argv[1];
  try {
    fs::create_directories(root / "images");
    fs::create_directories(root / "golden");
    for (std::uint32_t i = 0; i < kSceneCount; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "scene_%u.pgm", i);
      save_pgm(synthesize_scene(i), root / "images" / name);
    }

    ModelSuite suite{load(root / "weights" / "w_ar.umew"), load(root / "weights" / "w_masked.umew"),
                     load(root / "weights" / "w_textcond.umew")};
    const std::uint32_t v = suite.autoregressive->image_vocab_size();
    nlohmann::json cdfs = nlohmann::json::array();
    const TokenSequence empty(Vocabulary::image(v));
    cdfs.push_back(cdf_entry("ar/empty-prefix/position-0", next_cdf_ar(suite.autoregressive, empty, 0)));
    const MaskedSequence placeholders(Vocabulary::image(v), {v, v, 0}, BinaryMask({1, 1, 0}));
    cdfs.push_back(cdf_entry("masked/two-placeholders/position-2",
                             next_cdf_masked(suite.masked, placeholders, 2)));
    const TokenSequence text(Vocabulary::text(suite.text_conditional->text_vocab_size()), {1, 2, 3});
    cdfs.push_back(cdf_entry("textcond/text-1-2-3/position-0",
                             next_cdf_textcond(suite.text_conditional, text, empty, 0)));
    const std::string dumped = cdfs.dump(1) + "\n";
    write_file(root / "golden" / "cdf_golden.json",
               ByteView(reinterpret_cast<const std::uint8_t*>(dumped.data()), dumped.size()));

    const auto texts = load_token_corpus(root / "corpus" / "heldout.text.umtk", Modality::kText);
    const auto images = load_token_corpus(root / "corpus" / "heldout.image.umtk", Modality::kImage);
    const MockGenerator gen(kGeneratorSeed);
    for (Task task : {Task::kTextToImage, Task::kInpaint, Task::kOutpaint, Task::kVqa}) {
      const std::string prefix = std::string(task_name(task)) + "_";
      const fs::path dir = root / "golden";
      EdgeInputs in{texts[0], std::nullopt, std::nullopt};
      save_tokens(texts[0], dir / (prefix + "text.umtk"));
      if (task != Task::kTextToImage) {
        in.image = images[0];
        save_tokens(images[0], dir / (prefix + "image.umtk"));
      }
      if (task == Task::kInpaint) {
        in.mask = golden_mask(images[0]);
        save_mask(*in.mask, dir / (prefix + "mask.umtk"));
      }
      EdgeSession edge(task, suite);
      CloudSession cloud(task, suite);
      const Bytes up = edge.encode_uplink(in);
      const UplinkContents contents = cloud.decode_uplink(up);
      GenerationParams params;
      params.image_tokens = images[0].size();
      params.image_vocab = v;
      const TokenSequence generated = mock_cloud_generate(gen, task, contents, params);
      save_tokens(generated, dir / (prefix + "generated.umtk"));
      const Bytes down = cloud.encode_downlink(generated);
      const TokenSequence result = edge.decode_downlink(down);
      save_tokens(result, dir / (prefix + "result.umtk"));
      write_file(dir / (prefix + "up.umic"), up);
      write_file(dir / (prefix + "down.umic"), down);
      std::cout << task_name(task) << ": uplink " << up.size() << " bytes, downlink " << down.size()
                << " bytes\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
