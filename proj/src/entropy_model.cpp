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

#include <cmath>
#include <string>

#include "tokenlink/range_coder.hpp"

namespace tokenlink {

AdaptiveFreqModel::AdaptiveFreqModel(std::uint32_t vocab_size) {
  if (vocab_size > kMaxAlphabet) fail(ErrorCode::kVocabTooLarge, std::to_string(vocab_size));
  if (vocab_size < 2) fail(ErrorCode::kInvalidArgument, "vocabulary size must be >= 2");
  counts_.assign(vocab_size, 1);
}

QuantizedCdf AdaptiveFreqModel::next_cdf() { return quantize_counts(counts_); }

void AdaptiveFreqModel::observe(TokenId id) {
  if (id >= counts_.size()) return;
  if (++counts_[id] >= kCountCap) {
    for (std::uint32_t& c : counts_) c = (c + 1) / 2;
  }
}

TransformerModel::TransformerModel(std::shared_ptr<const EntropyModelWeights> weights,
                                   std::span<const TokenId> text)
    : context_(std::move(weights)) {
  if (context_.weights().mode() == ModelMode::kTextConditional) {
    for (TokenId id : text) context_.push_text(id);
  } else if (!text.empty()) {
    fail(ErrorCode::kModeMismatch, "only text-conditional models take text");
  }
  context_.begin_image();
}

std::uint32_t TransformerModel::alphabet_size() const {
  return context_.weights().image_vocab_size();
}

std::unique_ptr<SymbolModel> make_model(ModelKind kind, std::uint32_t vocab_size,
                                        std::shared_ptr<const EntropyModelWeights> weights,
                                        std::span<const TokenId> text) {
  switch (kind) {
    case ModelKind::kUniform: return std::make_unique<UniformModel>(vocab_size);
    case ModelKind::kAdaptive: return std::make_unique<AdaptiveFreqModel>(vocab_size);
    case ModelKind::kAutoregressive:
    case ModelKind::kMasked:
    case ModelKind::kTextConditional: {
      if (!weights) fail(ErrorCode::kMissingModel, "transformer model requested without weights");
      const ModelMode want = kind == ModelKind::kAutoregressive ? ModelMode::kAutoregressive
                             : kind == ModelKind::kMasked       ? ModelMode::kMasked
                                                                : ModelMode::kTextConditional;
      if (weights->mode() != want) {
        fail(ErrorCode::kModeMismatch, "weights are " + std::string(model_mode_name(weights->mode())));
      }
      if (weights->image_vocab_size() != vocab_size) {
        fail(ErrorCode::kVocabularyKindMismatch,
             "weights cover " + std::to_string(weights->image_vocab_size()) +
                 " image tokens, sequence vocabulary has " + std::to_string(vocab_size));
      }
      return std::make_unique<TransformerModel>(std::move(weights), text);
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown model kind");
}

Bytes encode_tokens(SymbolModel& model, std::span<const TokenId> ids, const BinaryMask* mask,
                    TokenId placeholder) {
  if (mask && mask->size() != ids.size()) {
    fail(ErrorCode::kLengthMismatch, "mask and sequence differ in length");
  }
  RangeEncoder enc;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (mask && (*mask)[i]) {
      model.observe(placeholder);
      continue;
    }
    enc.encode(model.next_cdf(), ids[i]);
    if (i + 1 < ids.size()) model.observe(ids[i]);
  }
  return enc.finish();
}

std::vector<TokenId> decode_tokens(SymbolModel& model, ByteView bytes, std::size_t count,
                                   const BinaryMask* mask, TokenId placeholder) {
  RangeDecoder dec(bytes);
  std::vector<TokenId> out;
  const std::size_t positions = mask ? mask->size() : count;
  out.reserve(mask ? positions - mask->ones_count() : count);
  for (std::size_t i = 0; i < positions; ++i) {
    if (mask && (*mask)[i]) {
      model.observe(placeholder);
      continue;
    }
    const TokenId id = dec.decode(model.next_cdf());
    if (i + 1 < positions) model.observe(id);
    out.push_back(id);
  }
  return out;
}

Bytes encode_in_context(SymbolModel& model, std::span<const TokenId> ids, const BinaryMask& coded) {
  if (coded.size() != ids.size()) fail(ErrorCode::kLengthMismatch, "mask and sequence differ in length");
  RangeEncoder enc;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (coded[i]) enc.encode(model.next_cdf(), ids[i]);
    if (i + 1 < ids.size()) model.observe(ids[i]);
  }
  return enc.finish();
}

std::vector<TokenId> decode_in_context(SymbolModel& model, ByteView bytes, std::vector<TokenId> known,
                                       const BinaryMask& coded) {
  if (coded.size() != known.size()) fail(ErrorCode::kLengthMismatch, "mask and sequence differ in length");
  RangeDecoder dec(bytes);
  for (std::size_t i = 0; i < known.size(); ++i) {
    if (coded[i]) known[i] = dec.decode(model.next_cdf());
    if (i + 1 < known.size()) model.observe(known[i]);
  }
  return known;
}

double cross_entropy_in_context(SymbolModel& model, std::span<const TokenId> ids, const BinaryMask& coded) {
  if (coded.size() != ids.size()) fail(ErrorCode::kLengthMismatch, "mask and sequence differ in length");
  double bits = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (coded[i]) {
      const QuantizedCdf cdf = model.next_cdf();
      if (ids[i] >= cdf.alphabet_size()) fail(ErrorCode::kSymbolOutOfRange, "token " + std::to_string(ids[i]));
      bits -= std::log2(static_cast<double>(cdf.frequency(ids[i])) / kCdfTotal);
    }
    if (i + 1 < ids.size()) model.observe(ids[i]);
  }
  return bits;
}

double cross_entropy_bits(SymbolModel& model, std::span<const TokenId> ids, const BinaryMask* mask,
                          TokenId placeholder) {
  if (mask && mask->size() != ids.size()) {
    fail(ErrorCode::kLengthMismatch, "mask and sequence differ in length");
  }
  double bits = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (mask && (*mask)[i]) {
      model.observe(placeholder);
      continue;
    }
    const QuantizedCdf cdf = model.next_cdf();
    if (ids[i] >= cdf.alphabet_size()) {
      fail(ErrorCode::kSymbolOutOfRange, "token " + std::to_string(ids[i]));
    }
    bits -= std::log2(static_cast<double>(cdf.frequency(ids[i])) / kCdfTotal);
    if (i + 1 < ids.size()) model.observe(ids[i]);
  }
  return bits;
}

double cross_entropy_bits(ModelKind kind, const TokenSequence& seq,
                          std::shared_ptr<const EntropyModelWeights> weights,
                          const BinaryMask* mask, const TokenSequence* text) {
  std::span<const TokenId> text_ids;
  if (text) text_ids = text->ids();
  auto model = make_model(kind, seq.vocab().size(), std::move(weights), text_ids);
  const TokenId placeholder = seq.vocab().maybe_mask_token_id().value_or(seq.vocab().size());
  return cross_entropy_bits(*model, seq.ids(), mask, placeholder);
}

}  // namespace tokenlink
