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

#include "tokenlink/text_codec.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include <brotli/decode.h>
#include <brotli/encode.h>

namespace tokenlink {

Bytes brotli_compress(ByteView input) {
  std::size_t out_size = BrotliEncoderMaxCompressedSize(input.size());
  if (out_size == 0) out_size = input.size() + 1024;
  Bytes out(out_size);
  if (!BrotliEncoderCompress(kBrotliQuality, kBrotliWindowBits, BROTLI_MODE_GENERIC, input.size(),
                             input.data(), &out_size, out.data())) {
    fail(ErrorCode::kInvalidArgument, "brotli compression failed");
  }
  out.resize(out_size);
  return out;
}

Bytes brotli_decompress(ByteView input, std::size_t max_output, ErrorCode overflow_code) {
  BrotliDecoderState* state = BrotliDecoderCreateInstance(nullptr, nullptr, nullptr);
  if (!state) fail(ErrorCode::kInvalidArgument, "cannot allocate brotli decoder");
  Bytes out;
  std::size_t avail_in = input.size();
  const std::uint8_t* next_in = input.data();
  std::uint8_t buffer[4096];
  BrotliDecoderResult result;
  do {
    std::size_t avail_out = sizeof(buffer);
    std::uint8_t* next_out = buffer;
    result = BrotliDecoderDecompressStream(state, &avail_in, &next_in, &avail_out, &next_out,
                                           nullptr);
    out.insert(out.end(), buffer, next_out);
    if (out.size() > max_output) {
      BrotliDecoderDestroyInstance(state);
      fail(overflow_code, "decompressed output exceeds " + std::to_string(max_output) + " bytes");
    }
  } while (result == BROTLI_DECODER_RESULT_NEEDS_MORE_OUTPUT);
  BrotliDecoderDestroyInstance(state);
  if (result != BROTLI_DECODER_RESULT_SUCCESS) {
    fail(ErrorCode::kCorruptPayload, "malformed or truncated brotli stream");
  }
  if (avail_in != 0) fail(ErrorCode::kCorruptPayload, "trailing bytes after brotli stream");
  return out;
}

TextPayload compress_text_tokens(const TokenSequence& tokens) {
  ByteWriter w;
  for (TokenId id : tokens.ids()) w.varint(id);
  return TextPayload{static_cast<std::uint32_t>(tokens.size()), brotli_compress(w.bytes())};
}

TokenSequence decompress_text_tokens(const TextPayload& payload, const Vocabulary& vocab) {
  // A u32 varint is at most 5 bytes.
  const std::size_t limit = static_cast<std::size_t>(payload.token_count) * 5;
  const Bytes raw = brotli_decompress(payload.compressed, limit, ErrorCode::kTokenCountMismatch);
  ByteReader r(raw, ErrorCode::kCorruptPayload);
  std::vector<TokenId> ids;
  ids.reserve(payload.token_count);
  while (!r.at_end()) {
    const std::uint64_t v = r.varint();
    if (v > 0xFFFFFFFFu) fail(ErrorCode::kCorruptPayload, "token id exceeds 32 bits");
    ids.push_back(static_cast<TokenId>(v));
  }
  if (ids.size() != payload.token_count) {
    fail(ErrorCode::kTokenCountMismatch, "payload declares " + std::to_string(payload.token_count) +
                                             " tokens, holds " + std::to_string(ids.size()));
  }
  return TokenSequence(vocab, std::move(ids));
}

std::vector<std::string_view> WordTokenizer::split(std::string_view text) {
  std::vector<std::string_view> pieces;
  std::size_t i = 0;
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  while (i < text.size()) {
    std::size_t start = i;
    if (text[i] == ' ' && i + 1 < text.size() && is_word(text[i + 1])) ++i;
    if (is_word(text[i])) {
      while (i < text.size() && is_word(text[i])) ++i;
    } else {
      ++i;
    }
    pieces.push_back(text.substr(start, i - start));
  }
  return pieces;
}

WordTokenizer WordTokenizer::train(std::span<const std::string> corpus, std::size_t max_pieces,
                                   std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const std::string& s : corpus) {
    for (std::string_view piece : split(s)) {
      if (piece.size() > 1) ++counts[std::string(piece)];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // Ties resolve alphabetically (std::map order + stable sort).
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  WordTokenizer tok;
  for (const auto& [piece, count] : ranked) {
    if (count < min_count || tok.pieces_.size() >= max_pieces) break;
    tok.index_.emplace(piece, static_cast<TokenId>(256 + tok.pieces_.size()));
    tok.pieces_.push_back(piece);
  }
  return tok;
}

Vocabulary WordTokenizer::vocabulary() const {
  return Vocabulary::text(static_cast<std::uint32_t>(256 + pieces_.size()));
}

TokenSequence WordTokenizer::encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (std::string_view piece : split(text)) {
    auto it = index_.find(std::string(piece));
    if (it != index_.end()) {
      ids.push_back(it->second);
    } else {
      for (char c : piece) ids.push_back(static_cast<unsigned char>(c));
    }
  }
  return TokenSequence(vocabulary(), std::move(ids));
}

std::string WordTokenizer::decode(const TokenSequence& tokens) const {
  std::string out;
  for (TokenId id : tokens.ids()) {
    if (id < 256) {
      out.push_back(static_cast<char>(id));
    } else {
      out += pieces_.at(id - 256);
    }
  }
  return out;
}

namespace {

template <typename SizeFn>
double mean_ratio(std::span<const std::string> corpus, SizeFn&& compressed_size) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const std::string& s : corpus) {
    if (s.empty()) continue;
    sum += static_cast<double>(compressed_size(s)) / static_cast<double>(s.size());
    ++n;
  }
  if (n == 0) fail(ErrorCode::kEmptyCorpus, "no non-empty strings");
  return sum / static_cast<double>(n);
}

}  // namespace

double raw_compression_ratio(std::span<const std::string> corpus) {
  return mean_ratio(corpus, [](const std::string& s) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
    return brotli_compress(ByteView(p, s.size())).size();
  });
}

double token_compression_ratio(std::span<const std::string> corpus, const WordTokenizer& tokenizer) {
  return mean_ratio(corpus, [&](const std::string& s) {
    return compress_text_tokens(tokenizer.encode(s)).compressed.size();
  });
}

}  // namespace tokenlink
