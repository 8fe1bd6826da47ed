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

#include <filesystem>
#include <vector>

#include "tokenlink/bytes.hpp"
#include "tokenlink/tokens.hpp"

namespace tokenlink {

/// UMTK token record: "UMTK" | vocab_size u32 | count u32 | LEB128 ids.
/// A file may hold several records back to back (corpus files). The
/// vocabulary kind is not stored; callers say which one they expect.
void write_token_record(ByteWriter& out, const TokenSequence& tokens);
/// Reads one record; validates ids against the stored vocabulary size.
std::vector<TokenId> read_token_record(ByteReader& in, std::uint32_t& vocab_size);

TokenSequence load_tokens(const std::filesystem::path& path, Modality kind);
void save_tokens(const TokenSequence& tokens, const std::filesystem::path& path);

std::vector<TokenSequence> load_token_corpus(const std::filesystem::path& path, Modality kind);
void save_token_corpus(std::span<const TokenSequence> records, const std::filesystem::path& path);

/// Masks travel as UMTK records over a 2-symbol vocabulary.
BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace tokenlink
