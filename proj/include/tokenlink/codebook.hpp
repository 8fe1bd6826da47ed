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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tokenlink/image.hpp"
#include "tokenlink/tokens.hpp"

namespace tokenlink {

inline constexpr std::uint32_t kPatchSize = 4;
inline constexpr std::uint32_t kPatchPixels = kPatchSize * kPatchSize;
inline constexpr std::uint32_t kCodebookSize = 256;

using Patch = std::array<double, kPatchPixels>;

/// Patch vector quantizer standing in for a learned image tokenizer.
/// Entries are integer-valued, so a reconstructed patch quantizes back to an
/// entry that reproduces it exactly.
class PatchCodebook {
 public:
  /// Throws InvalidArgument for an empty entry list or non-integer entries.
  explicit PatchCodebook(std::vector<Patch> entries);

  /// Seeded k-means over every 4x4 patch of `images`. Initial centroids are
  /// distinct patches picked in seeded order; Lloyd iterations then run to
  /// convergence or `iterations`, and centroids are finally rounded.
  static PatchCodebook train(std::span<const GrayImage> images, std::uint64_t seed,
                             std::uint32_t size = kCodebookSize, std::uint32_t iterations = 25);

  std::uint32_t size() const { return static_cast<std::uint32_t>(entries_.size()); }
  const Patch& entry(TokenId id) const { return entries_.at(id); }
  const std::vector<Patch>& entries() const { return entries_; }
  Vocabulary vocabulary() const { return Vocabulary::image(size()); }

  /// Nearest entry by squared Euclidean distance; ties to the lower id.
  TokenId nearest(const Patch& patch) const;

 private:
  std::vector<Patch> entries_;
};

Patch extract_patch(const GrayImage& img, std::uint32_t patch_x, std::uint32_t patch_y);

/// Raster-order tokens, one per 4x4 patch. Throws BadDimensions.
TokenSequence mock_tokenize(const GrayImage& img, const PatchCodebook& codebook);

/// Pastes entry patches; clamps to [0, 255]. Throws LengthMismatch unless
/// tokens.size() == (width / 4) * (height / 4), BadDimensions for sizes not
/// divisible by 4.
GrayImage mock_detokenize(const TokenSequence& tokens, const PatchCodebook& codebook,
                          std::uint32_t width, std::uint32_t height);

/// Per-patch intensity variance, raster order; importance scores for
/// rate_control_drop.
std::vector<double> patch_variance(const GrayImage& img);

}  // namespace tokenlink
