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

#include "tokenlink/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string_view>

#include "tokenlink/rng.hpp"

namespace tokenlink {

namespace {

enum : std::uint64_t { kTagT2I = 1, kTagInpaint = 2, kTagOutpaint = 3, kTagAnswer = 4 };

std::vector<TokenId> draw(std::uint64_t key, std::size_t count, std::uint32_t vocab) {
  std::mt19937_64 rng(key);
  std::vector<TokenId> out(count);
  for (TokenId& id : out) id = static_cast<TokenId>(uniform_below(rng, vocab));
  return out;
}

}  // namespace

TokenSequence MockGenerator::text_to_image(const TokenSequence& text, std::size_t count,
                                           const Vocabulary& image_vocab) const {
  const std::uint64_t key = KeyHasher(seed_).add(kTagT2I).add(count).add_all(text.ids()).value();
  return TokenSequence(image_vocab, draw(key, count, image_vocab.size()));
}

TokenSequence MockGenerator::inpaint(const TokenSequence& text, const MaskedSequence& image) const {
  KeyHasher h(seed_);
  h.add(kTagInpaint).add_all(text.ids()).add_all(image.ids());
  return TokenSequence(Vocabulary::image(image.vocab().size()),
                       draw(h.value(), image.mask().ones_count(), image.vocab().size()));
}

TokenSequence MockGenerator::outpaint(const TokenSequence& text, const TokenSequence& image,
                                      std::size_t extension) const {
  KeyHasher h(seed_);
  h.add(kTagOutpaint).add(extension).add_all(text.ids()).add_all(image.ids());
  return TokenSequence(image.vocab(), draw(h.value(), extension, image.vocab().size()));
}

TokenSequence MockGenerator::answer(const TokenSequence& question, const TokenSequence& image) const {
  KeyHasher h(seed_);
  h.add(kTagAnswer).add_all(question.ids()).add_all(image.ids());
  return TokenSequence(question.vocab(), draw(h.value(), kAnswerLength, question.vocab().size()));
}

TokenSequence mock_cloud_generate(const MockGenerator& gen, Task task, const UplinkContents& inputs,
                                  const GenerationParams& params) {
  if (!inputs.text) fail(ErrorCode::kMissingModality, "generator needs the text input");
  const MockGenerator keyed(KeyHasher(gen.seed()).add(inputs.task_token).value());
  switch (task) {
    case Task::kTextToImage:
      return keyed.text_to_image(*inputs.text, params.image_tokens, Vocabulary::image(params.image_vocab));
    case Task::kInpaint:
      if (!inputs.masked_image) fail(ErrorCode::kMissingModality, "inpainting needs a masked image");
      return keyed.inpaint(*inputs.text, *inputs.masked_image);
    case Task::kOutpaint:
      if (!inputs.image) fail(ErrorCode::kMissingModality, "outpainting needs an image");
      return keyed.outpaint(*inputs.text, *inputs.image,
                            params.outpaint_extension.value_or(inputs.image->size() / 2));
    case Task::kVqa:
      if (!inputs.image) fail(ErrorCode::kMissingModality, "VQA needs an image");
      return keyed.answer(*inputs.text, *inputs.image);
  }
  fail(ErrorCode::kUnknownTask, "unknown task");
}

std::vector<std::string> synthetic_prompts(std::size_t count, std::uint64_t seed) {
  static constexpr std::array<std::string_view, 20> kTemplates = {
      "a {adj} {noun} sitting on a {material} table at {time}",
      "a photo of a {adj} {noun} in the {place}",
      "close-up of a {noun} made of {material}, {light} lighting",
      "an oil painting of a {adj} {noun} near the {place}",
      "two {noun}s playing in the {place} during {time}",
      "a {adj} {noun} under {light} light, {style} style",
      "a {material} sculpture of a {noun} in a {place}",
      "the {place} at {time} with a {adj} {noun} in the foreground",
      "a {style} illustration of a {noun} wearing a {adj} hat",
      "a {adj} {noun} looking out of a window at {time}",
      "aerial view of a {place} with a {adj} {noun}",
      "a small {noun} next to a {material} vase, {light} lighting",
      "a {noun} on a {adj} background, {style} style",
      "a {adj} {noun} running through the {place}",
      "a {noun} and a {noun} sharing a {material} bench",
      "a black and white photo of a {adj} {noun}",
      "a {adj} {noun} reflected in a {material} mirror",
      "a {noun} sleeping in the {place} at {time}",
      "a detailed {style} drawing of a {material} {noun}",
      "what color is the {noun} in the {place}?",
  };
  static constexpr std::array<std::string_view, 12> kAdj = {
      "red", "blue", "small", "large", "old", "shiny", "fluffy", "golden", "quiet", "bright",
      "wooden", "green"};
  static constexpr std::array<std::string_view, 16> kNoun = {
      "fox", "cat", "dog", "horse", "bird", "robot", "tree", "car", "boat", "house", "lamp",
      "chair", "owl", "rabbit", "bicycle", "teapot"};
  static constexpr std::array<std::string_view, 8> kMaterial = {
      "wooden", "glass", "stone", "metal", "marble", "paper", "clay", "velvet"};
  static constexpr std::array<std::string_view, 10> kPlace = {
      "forest", "city", "garden", "desert", "kitchen", "beach", "mountains", "library", "park",
      "harbor"};
  static constexpr std::array<std::string_view, 6> kTime = {"dawn", "noon", "dusk", "night",
                                                            "sunset", "sunrise"};
  static constexpr std::array<std::string_view, 6> kLight = {"soft", "warm", "dramatic", "cold",
                                                             "studio", "natural"};
  static constexpr std::array<std::string_view, 6> kStyle = {"watercolor", "pixel art", "anime",
                                                             "realistic", "cubist", "minimalist"};
  std::mt19937_64 rng(seed);
  auto pick = [&](const auto& words) -> std::string_view {
    return words[uniform_below(rng, words.size())];
  };
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string_view tmpl = pick(kTemplates);
    std::string s;
    for (std::size_t p = 0; p < tmpl.size();) {
      if (tmpl[p] != '{') {
        s.push_back(tmpl[p++]);
        continue;
      }
      const std::size_t close = tmpl.find('}', p);
      const std::string_view slot = tmpl.substr(p + 1, close - p - 1);
      if (slot == "adj") s += pick(kAdj);
      else if (slot == "noun") s += pick(kNoun);
      else if (slot == "material") s += pick(kMaterial);
      else if (slot == "place") s += pick(kPlace);
      else if (slot == "time") s += pick(kTime);
      else if (slot == "light") s += pick(kLight);
      else s += pick(kStyle);
      p = close + 1;
    }
    out.push_back(std::move(s));
  }
  return out;
}

GrayImage synthesize_scene(std::uint32_t index, std::uint32_t width, std::uint32_t height) {
  std::mt19937_64 rng(KeyHasher(0x5CE4E).add(index).value());
  const double gx = uniform_unit(rng) * 2.0 - 1.0;
  const double gy = uniform_unit(rng) * 2.0 - 1.0;
  const double base = 70.0 + 80.0 * uniform_unit(rng);
  struct Blob {
    double cx, cy, r, amp;
  };
  std::vector<Blob> blobs(4);
  for (Blob& b : blobs) {
    b = {uniform_unit(rng) * width, uniform_unit(rng) * height, 6.0 + 14.0 * uniform_unit(rng),
         (uniform_unit(rng) - 0.5) * 140.0};
  }
  struct Rect {
    double x0, y0, x1, y1, value;
  };
  std::vector<Rect> rects(2);
  for (Rect& r : rects) {
    const double x0 = uniform_unit(rng) * width * 0.7;
    const double y0 = uniform_unit(rng) * height * 0.7;
    r = {x0, y0, x0 + 8.0 + uniform_unit(rng) * width * 0.3, y0 + 8.0 + uniform_unit(rng) * height * 0.3,
         30.0 + 200.0 * uniform_unit(rng)};
  }
  const double freq = 0.4 + 0.6 * uniform_unit(rng);
  const double phase = uniform_unit(rng) * 6.283185307179586;
  std::vector<std::uint8_t> samples(std::size_t{width} * height);
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < width; ++x) {
      double v = base + 40.0 * (gx * x / width + gy * y / height);
      for (const Blob& b : blobs) {
        const double dx = x - b.cx;
        const double dy = y - b.cy;
        v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.r * b.r));
      }
      for (const Rect& r : rects) {
        if (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1) v = 0.5 * v + 0.5 * r.value;
      }
      v += 12.0 * std::sin(freq * x + phase) * std::cos(freq * 0.7 * y);
      v += 10.0 * (uniform_unit(rng) - 0.5);
      samples[std::size_t{y} * width + x] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return GrayImage(width, height, std::move(samples));
}

}  // namespace tokenlink
