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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tokenlink/bytes.hpp"
#include "tokenlink/tokens.hpp"

namespace tokenlink {

/// Brotli settings for every text payload (RFC 7932 stream).
inline constexpr int kBrotliQuality = 9;
inline constexpr int kBrotliWindowBits = 22;

Bytes brotli_compress(ByteView input);
/// Throws CorruptPayload on malformed or truncated streams and
/// `overflow_code` when the output would exceed `max_output` bytes.
Bytes brotli_decompress(ByteView input, std::size_t max_output,
                        ErrorCode overflow_code = ErrorCode::kCorruptPayload);

struct TextPayload {
  std::uint32_t token_count = 0;
  Bytes compressed;

  friend bool operator==(const TextPayload&, const TextPayload&) = default;
};

/// Token ids as unsigned LEB128 varints, then Brotli.
TextPayload compress_text_tokens(const TokenSequence& tokens);
/// Errors: CorruptPayload, TokenCountMismatch, OutOfRangeToken.
TokenSequence decompress_text_tokens(const TextPayload& payload, const Vocabulary& vocab);

/// Word-level stand-in for a BPE tokenizer. Ids 0..255 are raw bytes (the
/// out-of-vocabulary fallback); id 256 + r is the r-th most frequent piece
/// of the training corpus. A piece is an alphanumeric run with an optional
/// single leading space. Decoding concatenates pieces, so the mapping is
/// lossless for any input.
class WordTokenizer {
 public:
  static WordTokenizer train(std::span<const std::string> corpus, std::size_t max_pieces = 50000,
                             std::size_t min_count = 2);

  Vocabulary vocabulary() const;
  TokenSequence encode(std::string_view text) const;
  std::string decode(const TokenSequence& tokens) const;
  std::size_t piece_count() const { return pieces_.size(); }

  /// Splits text into pieces as used for training.
  static std::vector<std::string_view> split(std::string_view text);

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Mean over non-empty strings of brotli(utf8).size / utf8.size.
double raw_compression_ratio(std::span<const std::string> corpus);
/// Mean over non-empty strings of compress_text_tokens(tokenize(s)).size /
/// utf8.size. Both throw EmptyCorpus when no string has any bytes.
double token_compression_ratio(std::span<const std::string> corpus, const WordTokenizer& tokenizer);

}  // namespace tokenlink
