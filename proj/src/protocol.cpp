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

#include "tokenlink/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tokenlink/entropy_model.hpp"
#include "tokenlink/range_coder.hpp"
#include "tokenlink/text_codec.hpp"

namespace tokenlink {

TransmissionPlan plan_for_task(Task task) {
  using K = PayloadKind;
  using W = WireModel;
  switch (task) {
    case Task::kTextToImage:
      return {task, {{K::kText, W::kByteCompressor}}, {{K::kImageFull, W::kTextConditional}}};
    case Task::kInpaint:
      return {task,
              {{K::kMaskBits, W::kRawBits},
               {K::kImageUnmasked, W::kMasked},
               {K::kText, W::kByteCompressor}},
              {{K::kImageFull, W::kTextConditional}}};
    case Task::kOutpaint:
      return {task,
              {{K::kImageFull, W::kTextConditional}, {K::kText, W::kByteCompressor}},
              {{K::kImageFull, W::kTextConditional}}};
    case Task::kVqa:
      return {task,
              {{K::kImageFull, W::kAutoregressive}, {K::kText, W::kByteCompressor}},
              {{K::kAnswerText, W::kByteCompressor}}};
  }
  fail(ErrorCode::kUnknownTask, "task byte " + std::to_string(static_cast<int>(task)));
}

namespace {

const std::shared_ptr<const EntropyModelWeights>& weights_for(const ModelSuite& suite,
                                                              WireModel model) {
  static const std::shared_ptr<const EntropyModelWeights> kNone;
  switch (model) {
    case WireModel::kAutoregressive: return suite.autoregressive;
    case WireModel::kMasked: return suite.masked;
    case WireModel::kTextConditional: return suite.text_conditional;
    default: return kNone;
  }
}

ModelKind model_kind(WireModel model) {
  switch (model) {
    case WireModel::kUniform: return ModelKind::kUniform;
    case WireModel::kAutoregressive: return ModelKind::kAutoregressive;
    case WireModel::kMasked: return ModelKind::kMasked;
    case WireModel::kTextConditional: return ModelKind::kTextConditional;
    default: break;
  }
  fail(ErrorCode::kIllegalFrameCombination, "not a token model: " + std::string(wire_model_name(model)));
}

/// True when the suite holds weights for `model` that cover this vocabulary,
/// sequence length and text.
bool serves(const ModelSuite& suite, WireModel model, std::uint32_t vocab_size, std::size_t image_len,
            std::span<const TokenId> text) {
  const auto& w = weights_for(suite, model);
  if (!w || w->image_vocab_size() != vocab_size) return false;
  const std::size_t text_len = model == WireModel::kTextConditional ? text.size() : 0;
  if (text_len + image_len > w->arch().max_context) return false;
  return model != WireModel::kTextConditional ||
         std::none_of(text.begin(), text.end(), [&](TokenId id) { return id >= w->text_vocab_size(); });
}

/// The planned model if the suite can serve it for this input, else uniform.
WireModel choose_model(const ModelSuite& suite, WireModel planned, std::uint32_t vocab_size,
                       std::size_t image_len, std::span<const TokenId> text) {
  if (suite.force_uniform || !serves(suite, planned, vocab_size, image_len, text)) return WireModel::kUniform;
  return planned;
}

std::unique_ptr<SymbolModel> build_model(const ModelSuite& suite, WireModel model,
                                         std::uint32_t vocab_size, std::span<const TokenId> text) {
  const ModelKind kind = model_kind(model);
  if (kind == ModelKind::kUniform) return make_model(kind, vocab_size);
  const auto& w = weights_for(suite, model);
  if (!w) {
    fail(ErrorCode::kMissingModel, "no weights loaded for " + std::string(wire_model_name(model)));
  }
  return make_model(kind, vocab_size, w, model == WireModel::kTextConditional ? text : std::span<const TokenId>{});
}

PayloadFrame text_frame(PayloadKind kind, const TokenSequence& text) {
  TextPayload p = compress_text_tokens(text);
  return PayloadFrame{kind, WireModel::kByteCompressor, p.token_count, text.vocab().size(),
                      std::move(p.compressed)};
}

TokenSequence read_text_frame(const PayloadFrame& f) {
  return decompress_text_tokens(TextPayload{f.token_count, f.bytes}, Vocabulary::text(f.vocab_size));
}

/// Codes a full image sequence (no mask) under the planned model.
PayloadFrame image_frame(const ModelSuite& suite, WireModel planned, const TokenSequence& image,
                         std::span<const TokenId> text) {
  if (image.vocab().kind() != Modality::kImage) {
    fail(ErrorCode::kVocabularyKindMismatch, "image payload over a text vocabulary");
  }
  const std::uint32_t v = image.vocab().size();
  const WireModel used = choose_model(suite, planned, v, image.size(), text);
  auto model = build_model(suite, used, v, text);
  return PayloadFrame{PayloadKind::kImageFull, used, static_cast<std::uint32_t>(image.size()), v,
                      encode_tokens(*model, image.ids())};
}

TokenSequence read_image_frame(const ModelSuite& suite, const PayloadFrame& f,
                               std::span<const TokenId> text) {
  const Vocabulary vocab = Vocabulary::image(f.vocab_size);
  auto model = build_model(suite, f.model, f.vocab_size, text);
  return TokenSequence(vocab, decode_tokens(*model, f.bytes, f.token_count));
}

/// Codes the generated subset of `full` (positions set in `coded`). When the
/// model can hold the whole sequence, the positions both ends already know
/// stay in its context; otherwise the subset is coded on its own.
PayloadFrame subset_frame(const ModelSuite& suite, WireModel planned, const Vocabulary& vocab,
                          std::span<const TokenId> full, const BinaryMask& coded,
                          std::span<const TokenId> text) {
  const std::uint32_t v = vocab.size();
  const auto count = static_cast<std::uint32_t>(coded.ones_count());
  const WireModel in_context = choose_model(suite, planned, v, full.size(), text);
  if (in_context != WireModel::kUniform) {
    auto model = build_model(suite, in_context, v, text);
    return PayloadFrame{PayloadKind::kImageFull, in_context, count, v, encode_in_context(*model, full, coded)};
  }
  std::vector<TokenId> subset;
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (coded[i]) subset.push_back(full[i]);
  }
  return image_frame(suite, planned, TokenSequence(vocab, std::move(subset)), text);
}

/// Inverse of subset_frame: `known` holds the shared positions; returns the
/// completed sequence.
std::vector<TokenId> read_subset_frame(const ModelSuite& suite, const PayloadFrame& f,
                                       std::vector<TokenId> known, const BinaryMask& coded,
                                       std::span<const TokenId> text) {
  if (f.token_count != coded.ones_count()) {
    fail(ErrorCode::kLengthMismatch, "downlink carries " + std::to_string(f.token_count) + " tokens, expected " +
                                         std::to_string(coded.ones_count()));
  }
  if (f.model != WireModel::kUniform && serves(suite, f.model, f.vocab_size, known.size(), text)) {
    auto model = build_model(suite, f.model, f.vocab_size, text);
    return decode_in_context(*model, f.bytes, std::move(known), coded);
  }
  const TokenSequence subset = read_image_frame(suite, f, text);
  std::size_t next = 0;
  for (std::size_t i = 0; i < known.size(); ++i) {
    if (coded[i]) known[i] = subset[next++];
  }
  return known;
}

/// Checks direction, task and the strict frame-kind match against `steps`;
/// image frames may carry uniform coding in place of the planned model.
Message parse_for(ByteView bytes, Task task, Direction direction, std::span<const PlanStep> steps) {
  Message m = read_message(bytes);
  if (m.header.direction != direction) {
    fail(ErrorCode::kDirectionMismatch,
         direction == Direction::kUplink ? "expected an uplink message" : "expected a downlink message");
  }
  if (m.header.task != task) {
    fail(ErrorCode::kTaskMismatch, "message is for task " + std::string(task_name(m.header.task)));
  }
  for (std::size_t i = 0; i < std::max(m.frames.size(), steps.size()); ++i) {
    if (i >= m.frames.size()) {
      fail(ErrorCode::kMissingModality, "no " + std::string(payload_kind_name(steps[i].kind)) + " frame");
    }
    if (i >= steps.size()) {
      fail(ErrorCode::kExtraModality,
           "unexpected " + std::string(payload_kind_name(m.frames[i].kind)) + " frame");
    }
    const PayloadFrame& f = m.frames[i];
    if (f.kind != steps[i].kind) {
      fail(ErrorCode::kMissingModality, "frame " + std::to_string(i) + " should be " +
                                            std::string(payload_kind_name(steps[i].kind)));
    }
    if (f.model != steps[i].model && f.model != WireModel::kUniform) {
      fail(ErrorCode::kIllegalFrameCombination,
           "frame " + std::to_string(i) + " coded " + std::string(wire_model_name(f.model)));
    }
  }
  return m;
}

void require_present(bool present, const char* what) {
  if (!present) fail(ErrorCode::kMissingModality, std::string("missing ") + what);
}

void require_absent(bool present, const char* what) {
  if (present) fail(ErrorCode::kExtraModality, std::string("unexpected ") + what);
}

void require_image_vocab(const TokenSequence& image) {
  if (image.vocab().kind() != Modality::kImage) {
    fail(ErrorCode::kVocabularyKindMismatch, "image input over a text vocabulary");
  }
}

}  // namespace

EdgeSession::EdgeSession(Task task, ModelSuite models, SessionOptions options)
    : task_(task), models_(std::move(models)), options_(options) {
  (void)plan_for_task(task);
}

Bytes EdgeSession::encode_uplink(const EdgeInputs& inputs) {
  if (state_ != EdgeState::kIdle) fail(ErrorCode::kStateError, "uplink already sent");
  const TransmissionPlan plan = plan_for_task(task_);
  require_present(inputs.text.has_value(), "text");
  if (task_ == Task::kTextToImage) {
    require_absent(inputs.image.has_value(), "image");
  } else {
    require_present(inputs.image.has_value(), "image");
    require_image_vocab(*inputs.image);
  }
  if (task_ == Task::kInpaint) {
    require_present(inputs.mask.has_value(), "mask");
  } else {
    require_absent(inputs.mask.has_value(), "mask");
  }
  const TokenSequence& text = *inputs.text;
  if (text.vocab().kind() != Modality::kText) {
    fail(ErrorCode::kVocabularyKindMismatch, "text input over an image vocabulary");
  }

  Message m{{task_, Direction::kUplink}, {}};
  for (const PlanStep& step : plan.uplink) {
    switch (step.kind) {
      case PayloadKind::kText:
        m.frames.push_back(text_frame(PayloadKind::kText, text));
        break;
      case PayloadKind::kImageFull:
        m.frames.push_back(image_frame(models_, step.model, *inputs.image, text.ids()));
        break;
      case PayloadKind::kMaskBits: {
        const BinaryMask& mask = *inputs.mask;
        if (mask.size() != inputs.image->size()) {
          fail(ErrorCode::kLengthMismatch, "mask and image differ in length");
        }
        m.frames.push_back(PayloadFrame{PayloadKind::kMaskBits, WireModel::kRawBits,
                                        static_cast<std::uint32_t>(mask.size()), 2,
                                        encode_mask_bits(mask)});
        break;
      }
      case PayloadKind::kImageUnmasked: {
        const TokenSequence& image = *inputs.image;
        const BinaryMask& mask = *inputs.mask;
        const std::uint32_t v = image.vocab().size();
        // Masked models see the placeholder context; they do not use text.
        const WireModel used = choose_model(models_, step.model, v, image.size(), {});
        auto model = build_model(models_, used, v, {});
        Bytes coded = encode_tokens(*model, image.ids(), &mask, image.vocab().mask_token_id());
        m.frames.push_back(PayloadFrame{PayloadKind::kImageUnmasked, used,
                                        static_cast<std::uint32_t>(image.size() - mask.ones_count()),
                                        v, std::move(coded)});
        break;
      }
      case PayloadKind::kAnswerText:
        break;
    }
  }
  Bytes out = write_message(m);
  held_ = inputs;
  if (task_ == Task::kInpaint) held_masked_ = apply_mask(*inputs.image, *inputs.mask);
  state_ = EdgeState::kUplinkSent;
  return out;
}

std::size_t EdgeSession::expected_downlink_tokens() const {
  if (state_ == EdgeState::kIdle) fail(ErrorCode::kStateError, "no uplink sent yet");
  switch (task_) {
    case Task::kInpaint: return held_.mask->ones_count();
    case Task::kOutpaint: return options_.outpaint_extension.value_or(held_.image->size() / 2);
    default: return 0;
  }
}

TokenSequence EdgeSession::decode_downlink(ByteView message) {
  if (state_ != EdgeState::kUplinkSent) {
    fail(ErrorCode::kStateError, state_ == EdgeState::kIdle ? "uplink not sent" : "session done");
  }
  const TransmissionPlan plan = plan_for_task(task_);
  const Message m = parse_for(message, task_, Direction::kDownlink, plan.downlink);
  const PayloadFrame& f = m.frames.front();
  const std::span<const TokenId> text = held_.text->ids();
  TokenSequence result = [&] {
    switch (task_) {
      case Task::kTextToImage:
        return read_image_frame(models_, f, text);
      case Task::kInpaint: {
        if (f.vocab_size != held_.image->vocab().size()) {
          fail(ErrorCode::kVocabularyKindMismatch, "downlink image vocabulary differs");
        }
        const MaskedSequence& base = *held_masked_;
        std::vector<TokenId> merged = read_subset_frame(
            models_, f, std::vector<TokenId>(base.ids().begin(), base.ids().end()), base.mask(), text);
        return TokenSequence(held_.image->vocab(), std::move(merged));
      }
      case Task::kOutpaint: {
        if (f.vocab_size != held_.image->vocab().size()) {
          fail(ErrorCode::kVocabularyKindMismatch, "downlink image vocabulary differs");
        }
        const std::size_t m = held_.image->size();
        std::vector<TokenId> known = held_.image->id_vector();
        known.resize(m + expected_downlink_tokens(), 0);
        std::vector<std::uint8_t> coded(known.size(), 0);
        std::fill(coded.begin() + static_cast<std::ptrdiff_t>(m), coded.end(), 1);
        return TokenSequence(held_.image->vocab(),
                             read_subset_frame(models_, f, std::move(known), BinaryMask(std::move(coded)), text));
      }
      case Task::kVqa:
        return read_text_frame(f);
    }
    fail(ErrorCode::kUnknownTask, "unknown task");
  }();
  state_ = EdgeState::kDone;
  return result;
}

CloudSession::CloudSession(Task task, ModelSuite models, SessionOptions options)
    : task_(task), models_(std::move(models)), options_(options) {
  (void)plan_for_task(task);
}

UplinkContents CloudSession::decode_uplink(ByteView message) {
  if (state_ != CloudState::kIdle) fail(ErrorCode::kStateError, "uplink already received");
  const TransmissionPlan plan = plan_for_task(task_);
  const Message m = parse_for(message, task_, Direction::kUplink, plan.uplink);

  UplinkContents out;
  out.task_token = static_cast<std::uint8_t>(task_);
  // Text first: image frames may be conditioned on it.
  for (const PayloadFrame& f : m.frames) {
    if (f.kind == PayloadKind::kText) out.text = read_text_frame(f);
  }
  const std::span<const TokenId> text = out.text->ids();
  std::optional<BinaryMask> mask;
  for (const PayloadFrame& f : m.frames) {
    switch (f.kind) {
      case PayloadKind::kImageFull:
        out.image = read_image_frame(models_, f, text);
        break;
      case PayloadKind::kMaskBits:
        if (f.vocab_size != 2) fail(ErrorCode::kCorruptPayload, "mask frame vocabulary must be 2");
        mask = decode_mask_bits(f.bytes, f.token_count);
        break;
      case PayloadKind::kImageUnmasked: {
        // The mask frame precedes this one in the plan.
        const BinaryMask& bits = *mask;
        if (f.token_count != bits.size() - bits.ones_count()) {
          fail(ErrorCode::kLengthMismatch, "image frame token count disagrees with the mask");
        }
        const Vocabulary vocab = Vocabulary::image(f.vocab_size);
        auto model = build_model(models_, f.model, f.vocab_size, {});
        const std::vector<TokenId> visible =
            decode_tokens(*model, f.bytes, f.token_count, &bits, vocab.mask_token_id());
        std::vector<TokenId> ids(bits.size(), vocab.mask_token_id());
        std::size_t next = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) {
          if (!bits[i]) ids[i] = visible[next++];
        }
        out.masked_image = MaskedSequence(vocab, std::move(ids), bits);
        break;
      }
      case PayloadKind::kText:
      case PayloadKind::kAnswerText:
        break;
    }
  }
  uplink_ = out;
  state_ = CloudState::kUplinkReceived;
  return out;
}

const UplinkContents& CloudSession::uplink() const {
  if (!uplink_) fail(ErrorCode::kStateError, "no uplink received");
  return *uplink_;
}

std::optional<std::size_t> CloudSession::expected_downlink_tokens() const {
  const UplinkContents& up = uplink();
  switch (task_) {
    case Task::kInpaint: return up.masked_image->mask().ones_count();
    case Task::kOutpaint: return options_.outpaint_extension.value_or(up.image->size() / 2);
    default: return std::nullopt;
  }
}

Bytes CloudSession::encode_downlink(const TokenSequence& output) {
  if (state_ != CloudState::kUplinkReceived) {
    fail(ErrorCode::kStateError, state_ == CloudState::kIdle ? "uplink not received" : "session done");
  }
  const TransmissionPlan plan = plan_for_task(task_);
  const PlanStep step = plan.downlink.front();
  if (const auto expected = expected_downlink_tokens(); expected && *expected != output.size()) {
    fail(ErrorCode::kLengthMismatch, "generated " + std::to_string(output.size()) +
                                         " tokens, expected " + std::to_string(*expected));
  }
  Message m{{task_, Direction::kDownlink}, {}};
  if (step.kind == PayloadKind::kAnswerText) {
    if (output.vocab().kind() != Modality::kText) {
      fail(ErrorCode::kVocabularyKindMismatch, "answer over an image vocabulary");
    }
    m.frames.push_back(text_frame(PayloadKind::kAnswerText, output));
  } else {
    require_image_vocab(output);
    const std::span<const TokenId> text = uplink_->text->ids();
    if (task_ == Task::kInpaint) {
      const MaskedSequence& base = *uplink_->masked_image;
      if (output.vocab().size() != base.vocab().size()) {
        fail(ErrorCode::kVocabularyKindMismatch, "generated tokens use another image vocabulary");
      }
      const TokenSequence merged = merge_generated(base, output.ids());
      m.frames.push_back(subset_frame(models_, step.model, merged.vocab(), merged.ids(), base.mask(), text));
    } else if (task_ == Task::kOutpaint) {
      const TokenSequence& held = *uplink_->image;
      if (output.vocab() != held.vocab()) {
        fail(ErrorCode::kVocabularyKindMismatch, "extension uses another image vocabulary");
      }
      std::vector<TokenId> full = held.id_vector();
      full.insert(full.end(), output.ids().begin(), output.ids().end());
      std::vector<std::uint8_t> coded(full.size(), 0);
      std::fill(coded.begin() + static_cast<std::ptrdiff_t>(held.size()), coded.end(), 1);
      m.frames.push_back(subset_frame(models_, step.model, held.vocab(), full, BinaryMask(std::move(coded)), text));
    } else {
      m.frames.push_back(image_frame(models_, step.model, output, text));
    }
  }
  Bytes out = write_message(m);
  state_ = CloudState::kDone;
  return out;
}

BinaryMask rate_control_drop(const TokenSequence& u, double ratio, std::span<const double> importance) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) fail(ErrorCode::kInvalidArgument, "ratio must lie in [0, 1]");
  if (importance.size() != u.size()) {
    fail(ErrorCode::kLengthMismatch, "one importance score per token required");
  }
  const std::size_t m = u.size();
  // The epsilon keeps ratios such as 0.3 * 10 from flooring to 2.
  const std::size_t drop = std::min(m, static_cast<std::size_t>(std::floor(ratio * static_cast<double>(m) + 1e-9)));
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return importance[a] < importance[b]; });
  std::vector<std::uint8_t> bits(m, 0);
  for (std::size_t i = 0; i < drop; ++i) bits[order[i]] = 1;
  return BinaryMask(std::move(bits));
}

}  // namespace tokenlink
