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
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tokenlink/error.hpp"

namespace tokenlink {

using TokenId = std::uint32_t;

enum class Modality : std::uint8_t { kText, kImage };

/// A token id space. Image vocabularies reserve id `size` as the mask
/// placeholder, one past the last ordinary id.
class Vocabulary {
 public:
  static Vocabulary text(std::uint32_t size);
  static Vocabulary image(std::uint32_t size, bool with_mask_token = true);

  std::uint32_t size() const { return size_; }
  Modality kind() const { return kind_; }
  bool has_mask_token() const { return has_mask_; }
  /// Throws VocabularyLacksMaskToken for text vocabularies.
  TokenId mask_token_id() const;
  std::optional<TokenId> maybe_mask_token_id() const;

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  Vocabulary(std::uint32_t size, Modality kind, bool has_mask);

  std::uint32_t size_;
  Modality kind_;
  bool has_mask_;
};

/// Throws OutOfRangeToken(position, id) for the first id >= vocab.size().
void validate_sequence(const Vocabulary& vocab, std::span<const TokenId> ids);

/// Ordinary tokens only; construction validates every id.
class TokenSequence {
 public:
  explicit TokenSequence(Vocabulary vocab, std::vector<TokenId> ids = {});

  const Vocabulary& vocab() const { return vocab_; }
  std::span<const TokenId> ids() const { return ids_; }
  const std::vector<TokenId>& id_vector() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  TokenId operator[](std::size_t i) const { return ids_[i]; }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  Vocabulary vocab_;
  std::vector<TokenId> ids_;
};

/// Per-position edit indicator; 1 marks a masked position.
class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(std::vector<std::uint8_t> bits);
  static BinaryMask zeros(std::size_t length) { return BinaryMask(std::vector<std::uint8_t>(length, 0)); }
  static BinaryMask ones(std::size_t length) { return BinaryMask(std::vector<std::uint8_t>(length, 1)); }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t size() const { return bits_.size(); }
  std::size_t ones_count() const { return ones_; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t ones_ = 0;
};

/// The placeholder-substituted sequence: ids[i] == mask id exactly where the
/// mask bit is set.
class MaskedSequence {
 public:
  MaskedSequence(Vocabulary vocab, std::vector<TokenId> ids, BinaryMask mask);

  const Vocabulary& vocab() const { return vocab_; }
  std::span<const TokenId> ids() const { return ids_; }
  const BinaryMask& mask() const { return mask_; }
  std::size_t size() const { return ids_.size(); }

  friend bool operator==(const MaskedSequence&, const MaskedSequence&) = default;

 private:
  Vocabulary vocab_;
  std::vector<TokenId> ids_;
  BinaryMask mask_;
};

using ImagePart = std::variant<TokenSequence, MaskedSequence>;

/// Text-then-image pairing. The two modalities keep their own id spaces.
struct JointSequence {
  TokenSequence text;
  ImagePart image;
  std::optional<std::uint8_t> task_token;
};

MaskedSequence apply_mask(const TokenSequence& seq, const BinaryMask& mask);

/// Tokens at unmasked positions, in order.
TokenSequence extract_valid(const TokenSequence& seq, const BinaryMask& mask);

/// Tokens at masked positions, in order.
TokenSequence extract_at_masked(const TokenSequence& seq, const BinaryMask& mask);

/// Fills the masked positions of `base` from `generated`, in order.
TokenSequence merge_generated(const MaskedSequence& base, const TokenSequence& generated);
/// Raw-id form; rejects the mask id with MaskTokenInGenerated.
TokenSequence merge_generated(const MaskedSequence& base, std::span<const TokenId> generated);

JointSequence concat_modalities(const TokenSequence& text, const ImagePart& image);

}  // namespace tokenlink
