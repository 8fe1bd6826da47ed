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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tokenlink/image.hpp"
#include "tokenlink/protocol.hpp"
#include "tokenlink/tokens.hpp"

namespace tokenlink {

inline constexpr std::size_t kAnswerLength = 8;

/// Stand-in for the cloud's generative model. Every output is a seeded
/// pseudo-random draw keyed by the seed and the full input, so equal inputs
/// give equal outputs.
class MockGenerator {
 public:
  explicit MockGenerator(std::uint64_t seed) : seed_(seed) {}

  TokenSequence text_to_image(const TokenSequence& text, std::size_t count,
                              const Vocabulary& image_vocab) const;
  /// One token per masked position, keyed by the text and visible tokens.
  TokenSequence inpaint(const TokenSequence& text, const MaskedSequence& image) const;
  TokenSequence outpaint(const TokenSequence& text, const TokenSequence& image,
                         std::size_t extension) const;
  /// kAnswerLength tokens over the question's vocabulary.
  TokenSequence answer(const TokenSequence& question, const TokenSequence& image) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

struct GenerationParams {
  /// T2I output length and vocabulary.
  std::size_t image_tokens = 1024;
  std::uint32_t image_vocab = 8192;
  /// Outpaint extension; half the input when unset.
  std::optional<std::size_t> outpaint_extension;
};

/// Runs the task's generator on what the cloud decoded. The task token is
/// part of the key. Throws MissingModality when an input the task needs is
/// absent.
TokenSequence mock_cloud_generate(const MockGenerator& gen, Task task, const UplinkContents& inputs,
                                  const GenerationParams& params = {});

/// Templated image prompts ("a red fox sitting on a wooden table at dusk"),
/// `count` strings drawn from 20 templates with a seeded RNG.
std::vector<std::string> synthetic_prompts(std::size_t count, std::uint64_t seed);

/// Deterministic natural-looking test image: smooth illumination, soft
/// blobs, hard-edged shapes and fine texture. `index` selects the scene.
GrayImage synthesize_scene(std::uint32_t index, std::uint32_t width = 64, std::uint32_t height = 64);

}  // namespace tokenlink
