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

#include "tokenlink/transformer.hpp"

#include <cmath>
#include <string>

#include "tokenlink/det_math.hpp"

namespace tokenlink {

namespace {

constexpr double kLayerNormEps = 1e-5;

// y = x W + b with W stored (in, out). Each output accumulates over the
// input index in ascending order, starting from zero; the bias is added last.
void linear(std::span<const double> x, const double* w, const double* b, std::size_t out_dim,
            std::span<double> y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double xk = x[k];
    const double* row = w + k * out_dim;
    for (std::size_t j = 0; j < out_dim; ++j) y[j] += xk * row[j];
  }
  for (std::size_t j = 0; j < out_dim; ++j) y[j] += b[j];
}

void layer_norm(std::span<const double> x, const double* gain, const double* bias,
                std::span<double> y) {
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : x) {
    const double c = v - mean;
    sq += c * c;
  }
  const double inv = 1.0 / std::sqrt(sq / n + kLayerNormEps);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = ((x[i] - mean) * inv) * gain[i] + bias[i];
}

void require_mode(const EntropyModelWeights& w, ModelMode mode) {
  if (w.mode() != mode) {
    fail(ErrorCode::kModeMismatch, "weights are " + std::string(model_mode_name(w.mode())) +
                                       ", operation needs " + std::string(model_mode_name(mode)));
  }
}

void require_position(std::size_t position, std::size_t prefix_len) {
  if (position != prefix_len) {
    fail(ErrorCode::kInvalidArgument, "position " + std::to_string(position) +
                                          " must equal prefix length " + std::to_string(prefix_len));
  }
}

}  // namespace

TransformerContext::TransformerContext(std::shared_ptr<const EntropyModelWeights> weights)
    : weights_(std::move(weights)) {
  const EntropyModelWeights& w = *weights_;
  d_ = w.arch().d_model;
  heads_ = w.arch().n_heads;
  max_context_ = w.arch().max_context;
  embed_image_ = w.tensor("embed.image").data.data();
  if (w.mode() == ModelMode::kTextConditional) embed_text_ = w.tensor("embed.text").data.data();
  embed_boi_ = w.tensor("embed.boi").data.data();
  embed_pos_ = w.tensor("embed.position").data.data();
  final_gain_ = w.tensor("final_ln.gain").data.data();
  final_bias_ = w.tensor("final_ln.bias").data.data();
  head_w_ = w.tensor("head.weight").data.data();
  head_b_ = w.tensor("head.bias").data.data();
  for (std::uint32_t l = 0; l < w.arch().n_layers; ++l) {
    const std::string pre = "layers." + std::to_string(l) + ".";
    auto t = [&](const char* name) { return w.tensor(pre + name).data.data(); };
    layers_.push_back(LayerView{t("ln1.gain"), t("ln1.bias"), t("attn.query.weight"),
                                t("attn.query.bias"), t("attn.key.weight"), t("attn.key.bias"),
                                t("attn.value.weight"), t("attn.value.bias"),
                                t("attn.output.weight"), t("attn.output.bias"), t("ln2.gain"),
                                t("ln2.bias"), t("ffn.up.weight"), t("ffn.up.bias"),
                                t("ffn.down.weight"), t("ffn.down.bias")});
  }
  keys_.resize(layers_.size());
  values_.resize(layers_.size());
}

void TransformerContext::push_text(TokenId id) {
  if (weights_->mode() != ModelMode::kTextConditional) {
    fail(ErrorCode::kModeMismatch, "only text-conditional models take text context");
  }
  if (image_started_) fail(ErrorCode::kStateError, "text must precede the image tokens");
  if (id >= weights_->text_vocab_size()) {
    fail(ErrorCode::kOutOfRangeToken, "text id " + std::to_string(id) + " outside model vocabulary");
  }
  push_embedding(embed_text_ + static_cast<std::size_t>(id) * d_);
}

void TransformerContext::begin_image() {
  if (image_started_) fail(ErrorCode::kStateError, "image already started");
  push_embedding(embed_boi_);
  image_started_ = true;
}

void TransformerContext::push_image(TokenId id) {
  if (!image_started_) fail(ErrorCode::kStateError, "begin_image() not called");
  const std::uint32_t limit =
      weights_->image_vocab_size() + (weights_->mode() == ModelMode::kMasked ? 1u : 0u);
  if (id >= limit) {
    fail(ErrorCode::kOutOfRangeToken, "image id " + std::to_string(id) + " outside model vocabulary");
  }
  push_embedding(embed_image_ + static_cast<std::size_t>(id) * d_);
  ++image_tokens_;
}

void TransformerContext::push_embedding(const double* token_row) {
  if (slots_ >= max_context_) {
    fail(ErrorCode::kContextOverflow, "context full at " + std::to_string(max_context_) + " slots");
  }
  const std::size_t d = d_;
  const std::size_t ff = 4 * d;
  const std::size_t head_dim = d / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  const std::size_t slot = slots_;

  std::vector<double> x(d), h(d), q(d), k(d), v(d), att(d), proj(d), up(ff);
  const double* pos = embed_pos_ + slot * d;
  for (std::size_t e = 0; e < d; ++e) x[e] = token_row[e] + pos[e];

  std::vector<double> scores(slot + 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerView& L = layers_[l];
    layer_norm(x, L.ln1_gain, L.ln1_bias, h);
    linear(h, L.wq, L.bq, d, q);
    linear(h, L.wk, L.bk, d, k);
    linear(h, L.wv, L.bv, d, v);
    keys_[l].insert(keys_[l].end(), k.begin(), k.end());
    values_[l].insert(values_[l].end(), v.begin(), v.end());
    const double* K = keys_[l].data();
    const double* V = values_[l].data();

    for (std::size_t hd = 0; hd < heads_; ++hd) {
      const std::size_t off = hd * head_dim;
      for (std::size_t t = 0; t <= slot; ++t) {
        double dot = 0.0;
        const double* kt = K + t * d + off;
        for (std::size_t e = 0; e < head_dim; ++e) dot += q[off + e] * kt[e];
        scores[t] = dot * scale;
      }
      detmath::softmax(scores);
      for (std::size_t e = 0; e < head_dim; ++e) att[off + e] = 0.0;
      for (std::size_t t = 0; t <= slot; ++t) {
        const double p = scores[t];
        const double* vt = V + t * d + off;
        for (std::size_t e = 0; e < head_dim; ++e) att[off + e] += p * vt[e];
      }
    }
    linear(att, L.wo, L.bo, d, proj);
    for (std::size_t e = 0; e < d; ++e) x[e] += proj[e];

    layer_norm(x, L.ln2_gain, L.ln2_bias, h);
    linear(h, L.w_up, L.b_up, ff, up);
    for (double& u : up) u = u > 0.0 ? u : 0.0;
    linear(up, L.w_down, L.b_down, d, proj);
    for (std::size_t e = 0; e < d; ++e) x[e] += proj[e];
  }
  last_hidden_ = std::move(x);
  ++slots_;
}

std::vector<double> TransformerContext::next_probs() const {
  if (!image_started_) fail(ErrorCode::kStateError, "begin_image() not called");
  const std::size_t d = d_;
  const std::size_t vocab = weights_->image_vocab_size();
  std::vector<double> h(d), logits(vocab);
  layer_norm(last_hidden_, final_gain_, final_bias_, h);
  linear(h, head_w_, head_b_, vocab, logits);
  detmath::softmax(logits);
  return logits;
}

QuantizedCdf next_cdf_ar(std::shared_ptr<const EntropyModelWeights> weights,
                         const TokenSequence& prefix, std::size_t position) {
  require_mode(*weights, ModelMode::kAutoregressive);
  require_position(position, prefix.size());
  if (position >= weights->arch().max_context) {
    fail(ErrorCode::kContextOverflow, "position " + std::to_string(position));
  }
  TransformerContext ctx(std::move(weights));
  ctx.begin_image();
  for (TokenId id : prefix.ids()) ctx.push_image(id);
  return ctx.next_cdf();
}

QuantizedCdf next_cdf_masked(std::shared_ptr<const EntropyModelWeights> weights,
                             const MaskedSequence& context, std::size_t position) {
  require_mode(*weights, ModelMode::kMasked);
  if (position > context.size()) {
    fail(ErrorCode::kInvalidArgument, "position beyond the supplied context");
  }
  if (position < context.size() && context.mask()[position]) {
    fail(ErrorCode::kCalledOnMaskedPosition, "position " + std::to_string(position) + " is masked");
  }
  if (position >= weights->arch().max_context) {
    fail(ErrorCode::kContextOverflow, "position " + std::to_string(position));
  }
  TransformerContext ctx(std::move(weights));
  ctx.begin_image();
  for (std::size_t i = 0; i < position; ++i) ctx.push_image(context.ids()[i]);
  return ctx.next_cdf();
}

QuantizedCdf next_cdf_masked(std::shared_ptr<const EntropyModelWeights> weights,
                             const TokenSequence& prefix, std::size_t position) {
  return next_cdf_masked(std::move(weights),
                         MaskedSequence(prefix.vocab(), prefix.id_vector(),
                                        BinaryMask::zeros(prefix.size())),
                         position);
}

QuantizedCdf next_cdf_textcond(std::shared_ptr<const EntropyModelWeights> weights,
                               const TokenSequence& text, const TokenSequence& prefix,
                               std::size_t position) {
  require_mode(*weights, ModelMode::kTextConditional);
  require_position(position, prefix.size());
  if (text.size() + position >= weights->arch().max_context) {
    fail(ErrorCode::kContextOverflow, "text " + std::to_string(text.size()) + " + position " +
                                          std::to_string(position));
  }
  TransformerContext ctx(std::move(weights));
  for (TokenId id : text.ids()) ctx.push_text(id);
  ctx.begin_image();
  for (TokenId id : prefix.ids()) ctx.push_image(id);
  return ctx.next_cdf();
}

}  // namespace tokenlink
