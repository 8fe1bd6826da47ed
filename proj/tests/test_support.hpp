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
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "tokenlink/bench.hpp"
#include "tokenlink/error.hpp"
#include "tokenlink/protocol.hpp"
#include "tokenlink/rng.hpp"
#include "tokenlink/tokens.hpp"
#include "tokenlink/weights.hpp"

namespace tokenlink {

inline void PrintTo(Task task, std::ostream* os) { *os << task_name(task); }
inline void PrintTo(ModelKind kind, std::ostream* os) { *os << model_kind_name(kind); }

}  // namespace tokenlink

namespace tokenlink::testing {

inline std::filesystem::path fixtures() { return TOKENLINK_TEST_FIXTURES; }

inline std::shared_ptr<const EntropyModelWeights> fixture_weights(const std::string& name) {
  return std::make_shared<const EntropyModelWeights>(load_weights(fixtures() / "weights" / name));
}

/// Loaded once per process.
inline const ModelSuite& fixture_suite() {
  static const ModelSuite suite{fixture_weights("w_ar.umew"), fixture_weights("w_masked.umew"),
                                fixture_weights("w_textcond.umew")};
  return suite;
}

inline std::vector<TokenId> random_ids(std::mt19937_64& rng, std::size_t n, std::uint32_t vocab) {
  std::vector<TokenId> ids(n);
  for (TokenId& id : ids) id = static_cast<TokenId>(uniform_below(rng, vocab));
  return ids;
}

inline BinaryMask random_mask(std::mt19937_64& rng, std::size_t n, double p = 0.5) {
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = uniform_unit(rng) < p ? 1 : 0;
  return BinaryMask(std::move(bits));
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tokenlink-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace tokenlink::testing

#define EXPECT_TOKENLINK_ERROR(statement, expected_code)                               \
  do {                                                                                 \
    try {                                                                              \
      statement;                                                                       \
      ADD_FAILURE() << "expected " << ::tokenlink::error_code_name(expected_code);     \
    } catch (const ::tokenlink::Error& e_) {                                           \
      EXPECT_EQ(e_.code(), expected_code) << e_.what();                                \
    }                                                                                  \
  } while (0)
