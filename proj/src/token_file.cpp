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

#include "tokenlink/token_file.hpp"

#include <algorithm>
#include <string_view>

namespace tokenlink {

namespace {

constexpr std::string_view kMagic = "UMTK";

Vocabulary vocabulary_for(Modality kind, std::uint32_t size) {
  return kind == Modality::kText ? Vocabulary::text(size) : Vocabulary::image(size);
}

}  // namespace

void write_token_record(ByteWriter& out, const TokenSequence& tokens) {
  out.raw(kMagic);
  out.u32(tokens.vocab().size());
  out.u32(static_cast<std::uint32_t>(tokens.size()));
  for (TokenId id : tokens.ids()) out.varint(id);
}

std::vector<TokenId> read_token_record(ByteReader& in, std::uint32_t& vocab_size) {
  const ByteView magic = in.raw(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    fail(ErrorCode::kBadMagic, "not a UMTK token record");
  }
  vocab_size = in.u32();
  const std::uint32_t count = in.u32();
  if (count > in.remaining()) fail(ErrorCode::kTruncated, "token record shorter than its count");
  std::vector<TokenId> ids;
  ids.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t v = in.varint();
    if (v >= vocab_size) {
      fail(ErrorCode::kOutOfRangeToken,
           "position " + std::to_string(i) + " holds id " + std::to_string(v));
    }
    ids.push_back(static_cast<TokenId>(v));
  }
  return ids;
}

TokenSequence load_tokens(const std::filesystem::path& path, Modality kind) {
  const Bytes data = read_file(path);
  ByteReader r(data);
  std::uint32_t vocab_size = 0;
  std::vector<TokenId> ids = read_token_record(r, vocab_size);
  if (!r.at_end()) fail(ErrorCode::kInvalidArgument, path.string() + " holds more than one record");
  return TokenSequence(vocabulary_for(kind, vocab_size), std::move(ids));
}

void save_tokens(const TokenSequence& tokens, const std::filesystem::path& path) {
  ByteWriter w;
  write_token_record(w, tokens);
  write_file(path, w.bytes());
}

std::vector<TokenSequence> load_token_corpus(const std::filesystem::path& path, Modality kind) {
  const Bytes data = read_file(path);
  ByteReader r(data);
  std::vector<TokenSequence> out;
  while (!r.at_end()) {
    std::uint32_t vocab_size = 0;
    std::vector<TokenId> ids = read_token_record(r, vocab_size);
    out.emplace_back(vocabulary_for(kind, vocab_size), std::move(ids));
  }
  return out;
}

void save_token_corpus(std::span<const TokenSequence> records, const std::filesystem::path& path) {
  ByteWriter w;
  for (const TokenSequence& t : records) write_token_record(w, t);
  write_file(path, w.bytes());
}

BinaryMask load_mask(const std::filesystem::path& path) {
  const Bytes data = read_file(path);
  ByteReader r(data);
  std::uint32_t vocab_size = 0;
  std::vector<TokenId> ids = read_token_record(r, vocab_size);
  if (vocab_size != 2) fail(ErrorCode::kInvalidArgument, "mask files use a 2-symbol vocabulary");
  return BinaryMask(std::vector<std::uint8_t>(ids.begin(), ids.end()));
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<TokenId> ids(mask.bits().begin(), mask.bits().end());
  save_tokens(TokenSequence(Vocabulary::text(2), std::move(ids)), path);
}

}  // namespace tokenlink
