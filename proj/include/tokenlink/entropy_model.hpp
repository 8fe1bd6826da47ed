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
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tokenlink/bytes.hpp"
#include "tokenlink/cdf.hpp"
#include "tokenlink/tokens.hpp"
#include "tokenlink/transformer.hpp"
#include "tokenlink/weights.hpp"

namespace tokenlink {

/// A causal probability model as seen by the coder: a CDF for the next coded
/// symbol, computed from observed context only. Encoder and decoder drive
/// identical instances in lockstep. Single-owner; not thread-safe.
class SymbolModel {
 public:
  virtual ~SymbolModel() = default;

  virtual std::uint32_t alphabet_size() const = 0;
  virtual QuantizedCdf next_cdf() = 0;
  /// Appends a context token. For masked models this includes placeholders,
  /// which are observed but never coded.
  virtual void observe(TokenId id) = 0;
};

class UniformModel final : public SymbolModel {
 public:
  explicit UniformModel(std::uint32_t vocab_size) : cdf_(cdf_uniform(vocab_size)) {}
  std::uint32_t alphabet_size() const override { return cdf_.alphabet_size(); }
  QuantizedCdf next_cdf() override { return cdf_; }
  void observe(TokenId) override {}

 private:
  QuantizedCdf cdf_;
};

/// Laplace-smoothed symbol counts (+1 per observation). When a count reaches
/// 2^15 every count is halved, rounding up so no count drops to zero.
class AdaptiveFreqModel final : public SymbolModel {
 public:
  static constexpr std::uint32_t kCountCap = 1u << 15;

  explicit AdaptiveFreqModel(std::uint32_t vocab_size);
  std::uint32_t alphabet_size() const override {
    return static_cast<std::uint32_t>(counts_.size());
  }
  QuantizedCdf next_cdf() override;
  /// Placeholders (ids >= alphabet) leave the counts untouched.
  void observe(TokenId id) override;

  std::span<const std::uint32_t> counts() const { return counts_; }

 private:
  std::vector<std::uint32_t> counts_;
};

/// Any of the three transformer modes. Text-conditional models take their
/// text at construction.
class TransformerModel final : public SymbolModel {
 public:
  explicit TransformerModel(std::shared_ptr<const EntropyModelWeights> weights,
                            std::span<const TokenId> text = {});
  std::uint32_t alphabet_size() const override;
  QuantizedCdf next_cdf() override { return context_.next_cdf(); }
  void observe(TokenId id) override { context_.push_image(id); }

 private:
  TransformerContext context_;
};

/// Probability model selector shared by the coder, the wire format and the
/// benchmark.
enum class ModelKind : std::uint8_t {
  kUniform,
  kAdaptive,
  kAutoregressive,
  kMasked,
  kTextConditional,
};

/// Builds a fresh model. Transformer kinds need `weights` of the matching
/// mode (ModeMismatch otherwise, MissingModel when null) whose image
/// vocabulary equals `vocab_size`.
std::unique_ptr<SymbolModel> make_model(ModelKind kind, std::uint32_t vocab_size,
                                        std::shared_ptr<const EntropyModelWeights> weights = nullptr,
                                        std::span<const TokenId> text = {});

/// Range-codes `ids` under `model`. With a mask, masked positions are fed to
/// the model as `placeholder` and not coded.
Bytes encode_tokens(SymbolModel& model, std::span<const TokenId> ids,
                    const BinaryMask* mask = nullptr, TokenId placeholder = 0);

/// Inverse of encode_tokens: decodes `count` tokens (no mask) or the
/// unmasked tokens of `mask` (count ignored). Returns only coded tokens.
std::vector<TokenId> decode_tokens(SymbolModel& model, ByteView bytes, std::size_t count,
                                   const BinaryMask* mask = nullptr, TokenId placeholder = 0);

/// Codes ids[i] where `coded` is set. Every position enters the model context
/// with its true id, so uncoded positions act as side information both ends
/// already hold.
Bytes encode_in_context(SymbolModel& model, std::span<const TokenId> ids, const BinaryMask& coded);

/// Inverse of encode_in_context. `known` supplies the uncoded positions (its
/// values at coded positions are ignored); returns the completed sequence.
std::vector<TokenId> decode_in_context(SymbolModel& model, ByteView bytes, std::vector<TokenId> known,
                                       const BinaryMask& coded);

/// Ideal code length of the positions set in `coded`, with every position
/// in context as in encode_in_context.
double cross_entropy_in_context(SymbolModel& model, std::span<const TokenId> ids, const BinaryMask& coded);

/// -sum log2(freq / 65536) of the true tokens over the coded set (unmasked
/// positions when a mask is given), under quantized CDFs.
double cross_entropy_bits(SymbolModel& model, std::span<const TokenId> ids,
                          const BinaryMask* mask = nullptr, TokenId placeholder = 0);

/// Convenience form building the model from its kind.
double cross_entropy_bits(ModelKind kind, const TokenSequence& seq,
                          std::shared_ptr<const EntropyModelWeights> weights = nullptr,
                          const BinaryMask* mask = nullptr, const TokenSequence* text = nullptr);

}  // namespace tokenlink
