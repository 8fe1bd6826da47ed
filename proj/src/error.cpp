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

#include "tokenlink/error.hpp"

namespace tokenlink {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfRangeToken: return "OutOfRangeToken";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kVocabularyLacksMaskToken: return "VocabularyLacksMaskToken";
    case ErrorCode::kMaskTokenInGenerated: return "MaskTokenInGenerated";
    case ErrorCode::kVocabularyKindMismatch: return "VocabularyKindMismatch";
    case ErrorCode::kInvalidVocabulary: return "InvalidVocabulary";
    case ErrorCode::kVocabTooLarge: return "VocabTooLarge";
    case ErrorCode::kContextOverflow: return "ContextOverflow";
    case ErrorCode::kModeMismatch: return "ModeMismatch";
    case ErrorCode::kCalledOnMaskedPosition: return "CalledOnMaskedPosition";
    case ErrorCode::kNonFiniteProbability: return "NonFiniteProbability";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kSymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorCode::kTruncatedStream: return "TruncatedStream";
    case ErrorCode::kDoubleFinish: return "DoubleFinish";
    case ErrorCode::kCorruptPayload: return "CorruptPayload";
    case ErrorCode::kTokenCountMismatch: return "TokenCountMismatch";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kIllegalFrameCombination: return "IllegalFrameCombination";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kUnknownTask: return "UnknownTask";
    case ErrorCode::kMissingModality: return "MissingModality";
    case ErrorCode::kExtraModality: return "ExtraModality";
    case ErrorCode::kStateError: return "StateError";
    case ErrorCode::kDirectionMismatch: return "DirectionMismatch";
    case ErrorCode::kTaskMismatch: return "TaskMismatch";
    case ErrorCode::kMissingModel: return "MissingModel";
    case ErrorCode::kBadDimensions: return "BadDimensions";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroPixels: return "ZeroPixels";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace tokenlink
