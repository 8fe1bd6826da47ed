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
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tokenlink/bytes.hpp"

namespace tokenlink {

enum class ModelMode : std::uint8_t { kAutoregressive = 0, kMasked = 1, kTextConditional = 2 };

std::string_view model_mode_name(ModelMode mode);

/// The only architecture the reference forward pass accepts.
struct ModelArch {
  std::uint32_t d_model = 64;
  std::uint32_t n_layers = 2;
  std::uint32_t n_heads = 4;
  std::uint32_t max_context = 1152;

  friend bool operator==(const ModelArch&, const ModelArch&) = default;
};

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<double> data;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Parameters of one tiny entropy transformer. Linear layers are stored
/// (in, out), row-major.
///
/// UMEW file layout (little-endian):
///   "UMEW" | version u8 (=1) | mode u8 | d_model, n_layers, n_heads,
///   max_context, image_vocab, text_vocab, tensor_count : u32 |
///   tensor_count x (name_len u16, name, rank u8, dims u32 x rank,
///   data f64 x prod(dims)) | CRC-32C of everything before it : u32
///
/// Tensors are written in canonical order (see expected_layout()).
class EntropyModelWeights {
 public:
  using Layout = std::vector<std::pair<std::string, std::vector<std::uint32_t>>>;

  /// Canonical tensor names and shapes for a mode.
  static Layout expected_layout(ModelMode mode, const ModelArch& arch,
                                std::uint32_t image_vocab, std::uint32_t text_vocab);

  /// Validates names and shapes against expected_layout(); throws
  /// ShapeMismatch.
  EntropyModelWeights(ModelMode mode, std::uint32_t image_vocab, std::uint32_t text_vocab,
                      std::vector<std::pair<std::string, Tensor>> tensors);

  /// Small random parameters, for tests.
  static EntropyModelWeights random(ModelMode mode, std::uint32_t image_vocab,
                                    std::uint32_t text_vocab, std::uint64_t seed,
                                    double scale = 0.3);

  ModelMode mode() const { return mode_; }
  const ModelArch& arch() const { return arch_; }
  std::uint32_t image_vocab_size() const { return image_vocab_; }
  std::uint32_t text_vocab_size() const { return text_vocab_; }
  const std::vector<std::pair<std::string, Tensor>>& tensors() const { return tensors_; }
  /// Throws ShapeMismatch for unknown names.
  const Tensor& tensor(std::string_view name) const;
  Tensor& mutable_tensor(std::string_view name);

  friend bool operator==(const EntropyModelWeights&, const EntropyModelWeights&) = default;

 private:
  ModelMode mode_;
  ModelArch arch_;
  std::uint32_t image_vocab_;
  std::uint32_t text_vocab_;
  std::vector<std::pair<std::string, Tensor>> tensors_;
};

Bytes serialize_weights(const EntropyModelWeights& weights);
/// Errors: ChecksumMismatch, UnsupportedVersion (version, mode or arch),
/// ShapeMismatch, BadMagic, Truncated.
EntropyModelWeights parse_weights(ByteView bytes);

EntropyModelWeights load_weights(const std::filesystem::path& path);
void save_weights(const EntropyModelWeights& weights, const std::filesystem::path& path);

}  // namespace tokenlink
