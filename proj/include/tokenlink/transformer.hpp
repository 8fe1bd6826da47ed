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
#include <span>
#include <vector>

#include "tokenlink/cdf.hpp"
#include "tokenlink/tokens.hpp"
#include "tokenlink/weights.hpp"

namespace tokenlink {

/// Incremental reference forward pass of the tiny entropy transformer.
///
/// Context layout: [text_0 .. text_{N-1}] [begin-of-image] [image_0 ..]. The
/// hidden state of the newest slot predicts the next image token. Masked
/// models additionally accept the placeholder id (image_vocab) as an image
/// input. Per-slot keys and values are cached; a slot is computed exactly
/// once, with the same operations whether the context is built
/// incrementally or from scratch.
///
/// Determinism contract: binary64 throughout, no fused multiply-add, every
/// reduction accumulates in ascending index order, softmax subtracts the
/// maximum and uses detmath::exp.
class TransformerContext {
 public:
  explicit TransformerContext(std::shared_ptr<const EntropyModelWeights> weights);

  /// Text-conditional models only, and only before begin_image().
  void push_text(TokenId id);
  void begin_image();
  /// An ordinary image token, or (masked models) the placeholder id.
  void push_image(TokenId id);

  /// Distribution of the next image token. Requires begin_image().
  std::vector<double> next_probs() const;
  QuantizedCdf next_cdf() const { return quantize_probs(next_probs()); }

  std::size_t slots() const { return slots_; }
  std::size_t image_tokens() const { return image_tokens_; }
  bool image_started() const { return image_started_; }
  const EntropyModelWeights& weights() const { return *weights_; }

 private:
  struct LayerView {
    const double* ln1_gain;
    const double* ln1_bias;
    const double* wq;
    const double* bq;
    const double* wk;
    const double* bk;
    const double* wv;
    const double* bv;
    const double* wo;
    const double* bo;
    const double* ln2_gain;
    const double* ln2_bias;
    const double* w_up;
    const double* b_up;
    const double* w_down;
    const double* b_down;
  };

  void push_embedding(const double* token_row);

  std::shared_ptr<const EntropyModelWeights> weights_;
  std::uint32_t d_;
  std::uint32_t heads_;
  std::uint32_t max_context_;
  const double* embed_image_;
  const double* embed_text_ = nullptr;
  const double* embed_boi_;
  const double* embed_pos_;
  const double* final_gain_;
  const double* final_bias_;
  const double* head_w_;
  const double* head_b_;
  std::vector<LayerView> layers_;

  std::vector<std::vector<double>> keys_;    // per layer, slots x d
  std::vector<std::vector<double>> values_;  // per layer, slots x d
  std::vector<double> last_hidden_;
  std::size_t slots_ = 0;
  std::size_t image_tokens_ = 0;
  bool image_started_ = false;
};

/// p(u_position | u_<position) under an autoregressive model.
/// Errors: ModeMismatch, ContextOverflow, InvalidArgument (position !=
/// prefix length).
QuantizedCdf next_cdf_ar(std::shared_ptr<const EntropyModelWeights> weights,
                         const TokenSequence& prefix, std::size_t position);

/// p(u_position | placeholder context ũ_<position) under a masked model.
/// `context` may extend past `position`; only ids before it are read. A
/// position inside `context` must be unmasked (CalledOnMaskedPosition).
QuantizedCdf next_cdf_masked(std::shared_ptr<const EntropyModelWeights> weights,
                             const MaskedSequence& context, std::size_t position);
/// Placeholder-free form: identical to the masked form with an all-zero mask.
QuantizedCdf next_cdf_masked(std::shared_ptr<const EntropyModelWeights> weights,
                             const TokenSequence& prefix, std::size_t position);

/// p(u_position | u_<position, text) under a text-conditional model.
QuantizedCdf next_cdf_textcond(std::shared_ptr<const EntropyModelWeights> weights,
                               const TokenSequence& text, const TokenSequence& prefix,
                               std::size_t position);

}  // namespace tokenlink
