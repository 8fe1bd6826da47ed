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
#include <string>
#include <vector>

#include "tokenlink/entropy_model.hpp"
#include "tokenlink/protocol.hpp"
#include "tokenlink/tokens.hpp"

namespace tokenlink {

/// Each image token stands for a 16x16 pixel patch.
inline constexpr std::uint32_t kPixelsPerToken = 256;

struct AnchorResult {
  std::uint32_t vocab_size;
  std::size_t token_count;
  std::size_t payload_bytes;
  double bpp;
};

/// Codes `token_count` seeded random tokens over `vocab_size` symbols with
/// the uniform model and rates the payload over a width x height frame.
AnchorResult uniform_anchor(std::uint64_t seed, std::uint32_t vocab_size = 8192,
                            std::size_t token_count = 1024, std::uint32_t width = 512,
                            std::uint32_t height = 512);

struct BenchRow {
  Task task;
  Direction direction;
  ModelKind model;
  std::size_t coded_tokens = 0;
  std::size_t payload_bytes = 0;
  double cross_entropy_bits = 0.0;
  double bpp = 0.0;

  double bits_per_token() const {
    return coded_tokens ? cross_entropy_bits / static_cast<double>(coded_tokens) : 0.0;
  }
};

struct BenchReport {
  AnchorResult anchor;
  std::vector<BenchRow> rows;

  std::string to_table() const;
  std::string to_csv() const;
};

/// Codes the paired held-out corpus for every image-carrying frame of every
/// task under each applicable model. Inpainting uses seeded masks of ratio
/// `mask_ratio`; outpainting codes the second half of each image as the
/// extension. Payload bytes are real range-coder output; bpp divides by the
/// image's pixel count (kPixelsPerToken per token). Throws MissingModel
/// unless all three weight sets are present.
BenchReport run_bench(const std::vector<TokenSequence>& texts, const std::vector<TokenSequence>& images,
                      const ModelSuite& models, std::uint64_t seed, double mask_ratio = 0.4);

std::string_view model_kind_name(ModelKind kind);

}  // namespace tokenlink
