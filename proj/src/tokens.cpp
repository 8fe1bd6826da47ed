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

#include "tokenlink/tokens.hpp"

#include <string>

namespace tokenlink {

Vocabulary::Vocabulary(std::uint32_t size, Modality kind, bool has_mask)
    : size_(size), kind_(kind), has_mask_(has_mask) {
  if (size < 2) fail(ErrorCode::kInvalidVocabulary, "vocabulary size must be >= 2");
}

Vocabulary Vocabulary::text(std::uint32_t size) { return Vocabulary(size, Modality::kText, false); }

Vocabulary Vocabulary::image(std::uint32_t size, bool with_mask_token) {
  return Vocabulary(size, Modality::kImage, with_mask_token);
}

TokenId Vocabulary::mask_token_id() const {
  if (!has_mask_) fail(ErrorCode::kVocabularyLacksMaskToken, "vocabulary has no mask token");
  return size_;
}

std::optional<TokenId> Vocabulary::maybe_mask_token_id() const {
  if (!has_mask_) return std::nullopt;
  return size_;
}

void validate_sequence(const Vocabulary& vocab, std::span<const TokenId> ids) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= vocab.size()) {
      fail(ErrorCode::kOutOfRangeToken,
           "position " + std::to_string(i) + " holds id " + std::to_string(ids[i]));
    }
  }
}

TokenSequence::TokenSequence(Vocabulary vocab, std::vector<TokenId> ids)
    : vocab_(vocab), ids_(std::move(ids)) {
  validate_sequence(vocab_, ids_);
}

BinaryMask::BinaryMask(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (std::uint8_t b : bits_) {
    if (b > 1) fail(ErrorCode::kInvalidArgument, "mask bits must be 0 or 1");
    ones_ += b;
  }
}

MaskedSequence::MaskedSequence(Vocabulary vocab, std::vector<TokenId> ids, BinaryMask mask)
    : vocab_(vocab), ids_(std::move(ids)), mask_(std::move(mask)) {
  if (ids_.size() != mask_.size()) fail(ErrorCode::kLengthMismatch, "ids and mask differ in length");
  const TokenId mask_id = vocab_.mask_token_id();
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (mask_[i] != (ids_[i] == mask_id)) {
      fail(ErrorCode::kInvalidArgument,
           "placeholder/mask disagreement at position " + std::to_string(i));
    }
    if (ids_[i] > mask_id) {
      fail(ErrorCode::kOutOfRangeToken,
           "position " + std::to_string(i) + " holds id " + std::to_string(ids_[i]));
    }
  }
}

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    fail(ErrorCode::kLengthMismatch,
         "sequence length " + std::to_string(a) + " vs mask length " + std::to_string(b));
  }
}

}  // namespace

MaskedSequence apply_mask(const TokenSequence& seq, const BinaryMask& mask) {
  require_same_length(seq.size(), mask.size());
  const TokenId mask_id = seq.vocab().mask_token_id();
  std::vector<TokenId> ids(seq.ids().begin(), seq.ids().end());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (mask[i]) ids[i] = mask_id;
  }
  return MaskedSequence(seq.vocab(), std::move(ids), mask);
}

TokenSequence extract_valid(const TokenSequence& seq, const BinaryMask& mask) {
  require_same_length(seq.size(), mask.size());
  std::vector<TokenId> out;
  out.reserve(seq.size() - mask.ones_count());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!mask[i]) out.push_back(seq[i]);
  }
  return TokenSequence(seq.vocab(), std::move(out));
}

TokenSequence extract_at_masked(const TokenSequence& seq, const BinaryMask& mask) {
  require_same_length(seq.size(), mask.size());
  std::vector<TokenId> out;
  out.reserve(mask.ones_count());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (mask[i]) out.push_back(seq[i]);
  }
  return TokenSequence(seq.vocab(), std::move(out));
}

TokenSequence merge_generated(const MaskedSequence& base, const TokenSequence& generated) {
  return merge_generated(base, generated.ids());
}

TokenSequence merge_generated(const MaskedSequence& base, std::span<const TokenId> generated) {
  if (generated.size() != base.mask().ones_count()) {
    fail(ErrorCode::kLengthMismatch, "generated " + std::to_string(generated.size()) +
                                         " tokens for " + std::to_string(base.mask().ones_count()) +
                                         " masked positions");
  }
  const auto mask_id = base.vocab().maybe_mask_token_id();
  for (TokenId id : generated) {
    if (mask_id && id == *mask_id) {
      fail(ErrorCode::kMaskTokenInGenerated, "generated tokens contain the mask id");
    }
  }
  std::vector<TokenId> out(base.ids().begin(), base.ids().end());
  std::size_t next = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (base.mask()[i]) out[i] = generated[next++];
  }
  return TokenSequence(base.vocab(), std::move(out));
}

JointSequence concat_modalities(const TokenSequence& text, const ImagePart& image) {
  if (text.vocab().kind() != Modality::kText) {
    fail(ErrorCode::kVocabularyKindMismatch, "text part must use a text vocabulary");
  }
  const Vocabulary& image_vocab =
      std::visit([](const auto& part) -> const Vocabulary& { return part.vocab(); }, image);
  if (image_vocab.kind() != Modality::kImage) {
    fail(ErrorCode::kVocabularyKindMismatch, "image part must use an image vocabulary");
  }
  return JointSequence{text, image, std::nullopt};
}

}  // namespace tokenlink
