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

#include <stdexcept>
#include <string>
#include <string_view>

namespace tokenlink {

enum class ErrorCode {
  // token-core
  kOutOfRangeToken,
  kLengthMismatch,
  kVocabularyLacksMaskToken,
  kMaskTokenInGenerated,
  kVocabularyKindMismatch,
  kInvalidVocabulary,
  // entropy models
  kVocabTooLarge,
  kContextOverflow,
  kModeMismatch,
  kCalledOnMaskedPosition,
  kNonFiniteProbability,
  kChecksumMismatch,
  kUnsupportedVersion,
  kShapeMismatch,
  // range coder
  kSymbolOutOfRange,
  kTruncatedStream,
  kDoubleFinish,
  // text codec
  kCorruptPayload,
  kTokenCountMismatch,
  kEmptyCorpus,
  // wire
  kBadMagic,
  kIllegalFrameCombination,
  kTruncated,
  // protocol
  kUnknownTask,
  kMissingModality,
  kExtraModality,
  kStateError,
  kDirectionMismatch,
  kTaskMismatch,
  kMissingModel,
  // simulator
  kBadDimensions,
  kDimensionMismatch,
  kZeroPixels,
  kInvalidArgument,
  // io
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure in the library is reported through this exception type; the
/// code identifies the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tokenlink
