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
#include "tokenlink/tokens.hpp"
#include "tokenlink/weights.hpp"
#include "tokenlink/wire.hpp"

namespace tokenlink {

struct PlanStep {
  PayloadKind kind;
  WireModel model;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

/// Payloads and coding models per direction, in frame order.
struct TransmissionPlan {
  Task task;
  std::vector<PlanStep> uplink;
  std::vector<PlanStep> downlink;
};

/// Inpaint and outpaint downlinks carry only the generated tokens; they use
/// the image-tokens-full frame kind.
TransmissionPlan plan_for_task(Task task);

/// Weight handles shared read-only by any number of sessions. A planned
/// transformer model that is absent, or does not cover the vocabulary,
/// sequence length or text ids at hand, is replaced by uniform coding; the
/// frame records which model was used.
struct ModelSuite {
  std::shared_ptr<const EntropyModelWeights> autoregressive;
  std::shared_ptr<const EntropyModelWeights> masked;
  std::shared_ptr<const EntropyModelWeights> text_conditional;
  bool force_uniform = false;
};

struct SessionOptions {
  /// Outpaint extension length in tokens. Defaults to half the uplinked
  /// image.
  std::optional<std::size_t> outpaint_extension;
};

struct EdgeInputs {
  std::optional<TokenSequence> text;
  std::optional<TokenSequence> image;
  std::optional<BinaryMask> mask;
};

/// What the cloud recovers from an uplink. `masked_image` is set for
/// inpainting (placeholders re-inserted), `image` for outpainting and VQA.
struct UplinkContents {
  std::uint8_t task_token = 0;
  std::optional<TokenSequence> text;
  std::optional<TokenSequence> image;
  std::optional<MaskedSequence> masked_image;
};

enum class EdgeState : std::uint8_t { kIdle, kUplinkSent, kDone };
enum class CloudState : std::uint8_t { kIdle, kUplinkReceived, kDone };

/// Edge side of one uplink/downlink exchange. Single-owner.
class EdgeSession {
 public:
  EdgeSession(Task task, ModelSuite models, SessionOptions options = {});

  /// Errors: MissingModality, ExtraModality, LengthMismatch, StateError.
  Bytes encode_uplink(const EdgeInputs& inputs);
  /// Inpaint: merged sequence; Outpaint: held image then extension; T2I:
  /// generated image; VQA: answer text.
  TokenSequence decode_downlink(ByteView message);

  Task task() const { return task_; }
  EdgeState state() const { return state_; }
  std::size_t expected_downlink_tokens() const;

 private:
  Task task_;
  ModelSuite models_;
  SessionOptions options_;
  EdgeState state_ = EdgeState::kIdle;
  EdgeInputs held_;
  std::optional<MaskedSequence> held_masked_;
};

/// Cloud side of one exchange. Single-owner.
class CloudSession {
 public:
  CloudSession(Task task, ModelSuite models, SessionOptions options = {});

  UplinkContents decode_uplink(ByteView message);
  /// `output` is the full image (T2I), the generated subset (inpaint,
  /// outpaint) or the answer text (VQA).
  Bytes encode_downlink(const TokenSequence& output);

  Task task() const { return task_; }
  CloudState state() const { return state_; }
  const UplinkContents& uplink() const;
  /// Tokens the downlink must carry; nullopt when unconstrained (T2I, VQA).
  std::optional<std::size_t> expected_downlink_tokens() const;

 private:
  Task task_;
  ModelSuite models_;
  SessionOptions options_;
  CloudState state_ = CloudState::kIdle;
  std::optional<UplinkContents> uplink_;
};

/// Masks the floor(ratio * M) lowest-scoring tokens, ties to the lower
/// index. Errors: LengthMismatch, InvalidArgument (ratio outside [0, 1]).
BinaryMask rate_control_drop(const TokenSequence& u, double ratio, std::span<const double> importance);

}  // namespace tokenlink
