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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "tokenlink/image.hpp"
#include "tokenlink/rng.hpp"

namespace tokenlink {

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kUniform: return "uniform";
    case ModelKind::kAdaptive: return "adaptive";
    case ModelKind::kAutoregressive: return "autoregressive";
    case ModelKind::kMasked: return "masked";
    case ModelKind::kTextConditional: return "text-conditional";
  }
  return "unknown";
}

AnchorResult uniform_anchor(std::uint64_t seed, std::uint32_t vocab_size, std::size_t token_count,
                            std::uint32_t width, std::uint32_t height) {
  std::mt19937_64 rng(seed);
  std::vector<TokenId> ids(token_count);
  for (TokenId& id : ids) id = static_cast<TokenId>(uniform_below(rng, vocab_size));
  UniformModel model(vocab_size);
  const Bytes payload = encode_tokens(model, ids);
  return AnchorResult{vocab_size, token_count, payload.size(), bpp(payload.size(), width, height)};
}

namespace {

struct Case {
  Task task;
  Direction direction;
  bool masked_frame;  // placeholders in context (inpaint uplink)
};

constexpr Case kCases[] = {
    {Task::kTextToImage, Direction::kDownlink, false},
    {Task::kInpaint, Direction::kUplink, true},
    {Task::kInpaint, Direction::kDownlink, false},
    {Task::kOutpaint, Direction::kUplink, false},
    {Task::kOutpaint, Direction::kDownlink, false},
    {Task::kVqa, Direction::kUplink, false},
};

constexpr ModelKind kKinds[] = {ModelKind::kUniform, ModelKind::kAdaptive, ModelKind::kAutoregressive,
                                ModelKind::kMasked, ModelKind::kTextConditional};

std::shared_ptr<const EntropyModelWeights> weights_for(const ModelSuite& s, ModelKind kind) {
  switch (kind) {
    case ModelKind::kAutoregressive: return s.autoregressive;
    case ModelKind::kMasked: return s.masked;
    case ModelKind::kTextConditional: return s.text_conditional;
    default: return nullptr;
  }
}

BinaryMask random_mask(std::size_t length, double ratio, std::mt19937_64& rng) {
  const std::size_t ones = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(length) + 1e-9));
  std::vector<std::uint8_t> bits(length, 0);
  std::fill(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(ones), 1);
  for (std::size_t i = length; i > 1; --i) std::swap(bits[i - 1], bits[uniform_below(rng, i)]);
  return BinaryMask(std::move(bits));
}

}  // namespace

BenchReport run_bench(const std::vector<TokenSequence>& texts, const std::vector<TokenSequence>& images,
                      const ModelSuite& models, std::uint64_t seed, double mask_ratio) {
  if (!models.autoregressive || !models.masked || !models.text_conditional) {
    fail(ErrorCode::kMissingModel, "bench needs autoregressive, masked and text-conditional weights");
  }
  if (texts.size() != images.size()) fail(ErrorCode::kLengthMismatch, "text and image corpora differ in size");
  if (images.empty()) fail(ErrorCode::kEmptyCorpus, "empty corpus");

  BenchReport report;
  report.anchor = uniform_anchor(seed);

  std::mt19937_64 rng(seed);
  std::vector<BinaryMask> masks;
  for (const TokenSequence& img : images) masks.push_back(random_mask(img.size(), mask_ratio, rng));

  for (const Case& c : kCases) {
    for (ModelKind kind : kKinds) {
      // Placeholder contexts need the masked model; causal models cannot see them.
      if (c.masked_frame && (kind == ModelKind::kAutoregressive || kind == ModelKind::kTextConditional)) {
        continue;
      }
      BenchRow row{c.task, c.direction, kind};
      std::uint64_t pixels = 0;
      for (std::size_t i = 0; i < images.size(); ++i) {
        const TokenSequence& img = images[i];
        const std::uint32_t v = img.vocab().size();
        pixels += std::uint64_t{img.size()} * kPixelsPerToken;
        std::span<const TokenId> text;
        if (kind == ModelKind::kTextConditional) text = texts[i].ids();
        auto encoder = make_model(kind, v, weights_for(models, kind), text);
        auto scorer = make_model(kind, v, weights_for(models, kind), text);
        if (c.direction == Direction::kDownlink && c.task != Task::kTextToImage) {
          // Generated subset, coded with the rest of the image in context.
          BinaryMask coded = masks[i];
          if (c.task == Task::kOutpaint) {
            std::vector<std::uint8_t> bits(img.size(), 0);
            std::fill(bits.begin() + static_cast<std::ptrdiff_t>(img.size() / 2), bits.end(), 1);
            coded = BinaryMask(std::move(bits));
          }
          row.payload_bytes += encode_in_context(*encoder, img.ids(), coded).size();
          row.cross_entropy_bits += cross_entropy_in_context(*scorer, img.ids(), coded);
          row.coded_tokens += coded.ones_count();
          continue;
        }
        const BinaryMask* mask = c.masked_frame ? &masks[i] : nullptr;
        const TokenId placeholder = v;
        row.payload_bytes += encode_tokens(*encoder, img.ids(), mask, placeholder).size();
        row.cross_entropy_bits += cross_entropy_bits(*scorer, img.ids(), mask, placeholder);
        row.coded_tokens += mask ? img.size() - mask->ones_count() : img.size();
      }
      row.bpp = static_cast<double>(row.payload_bytes) * 8.0 / static_cast<double>(pixels);
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string BenchReport::to_table() const {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof buf,
                "uniform anchor: V=%u, %zu tokens, %zu payload bytes over 512x512 -> %.6f bpp\n\n",
                anchor.vocab_size, anchor.token_count, anchor.payload_bytes, anchor.bpp);
  out += buf;
  out += "task      direction  model             tokens   bytes   bits/token   bpp\n";
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%-8s  %-9s  %-16s  %7zu  %6zu  %10.4f  %9.6f\n",
                  std::string(task_name(r.task)).c_str(),
                  r.direction == Direction::kUplink ? "uplink" : "downlink",
                  std::string(model_kind_name(r.model)).c_str(), r.coded_tokens, r.payload_bytes,
                  r.bits_per_token(), r.bpp);
    out += buf;
  }
  return out;
}

std::string BenchReport::to_csv() const {
  std::string out = "task,direction,model,tokens,bytes,bits_per_token,bpp\n";
  char buf[160];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%zu,%zu,%.6f,%.6f\n", std::string(task_name(r.task)).c_str(),
                  r.direction == Direction::kUplink ? "uplink" : "downlink",
                  std::string(model_kind_name(r.model)).c_str(), r.coded_tokens, r.payload_bytes,
                  r.bits_per_token(), r.bpp);
    out += buf;
  }
  return out;
}

}  // namespace tokenlink
