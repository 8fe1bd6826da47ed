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
#include <vector>

namespace tokenlink {

inline constexpr std::uint32_t kCdfPrecisionBits = 16;
inline constexpr std::uint32_t kCdfTotal = 1u << kCdfPrecisionBits;
inline constexpr std::uint32_t kMaxAlphabet = kCdfTotal;

/// Integer cumulative frequency table: cum[0] = 0, cum[V] = 65536, and every
/// symbol has frequency >= 1. This is the only thing the range coder sees of
/// a probability model.
class QuantizedCdf {
 public:
  /// Validates the invariants; throws InvalidArgument on violation.
  explicit QuantizedCdf(std::vector<std::uint32_t> cum);
  static QuantizedCdf from_frequencies(std::span<const std::uint32_t> freqs);

  std::uint32_t alphabet_size() const { return static_cast<std::uint32_t>(cum_.size() - 1); }
  std::uint32_t low(std::uint32_t symbol) const { return cum_[symbol]; }
  std::uint32_t high(std::uint32_t symbol) const { return cum_[symbol + 1]; }
  std::uint32_t frequency(std::uint32_t symbol) const { return cum_[symbol + 1] - cum_[symbol]; }
  /// Symbol whose interval [cum[s], cum[s+1]) contains `target` (< 65536).
  std::uint32_t find(std::uint32_t target) const;

  std::span<const std::uint32_t> cumulative() const { return cum_; }
  std::vector<std::uint32_t> frequencies() const;

  friend bool operator==(const QuantizedCdf&, const QuantizedCdf&) = default;

 private:
  std::vector<std::uint32_t> cum_;
};

/// Frequencies as equal as possible; the remainder goes to the lowest ids.
QuantizedCdf cdf_uniform(std::uint32_t vocab_size);

/// freq_k = max(1, round(p_k * (65536 - V))), then a largest-remainder
/// correction brings the total to exactly 65536. Symbols short of their
/// share gain first (ties: lower index); symbols above their share lose first
/// (ties: higher index), never dropping below 1. Rounding is half-up.
QuantizedCdf quantize_probs(std::span<const double> probs);

/// Integer-only quantization of positive counts: 1 + floor(c_k * (65536 - V)
/// / sum c), leftover units to the lowest ids.
QuantizedCdf quantize_counts(std::span<const std::uint32_t> counts);

}  // namespace tokenlink
