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

#include "tokenlink/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tokenlink/error.hpp"

namespace tokenlink {

QuantizedCdf::QuantizedCdf(std::vector<std::uint32_t> cum) : cum_(std::move(cum)) {
  if (cum_.size() < 3) fail(ErrorCode::kInvalidArgument, "a CDF needs at least two symbols");
  if (cum_.size() - 1 > kMaxAlphabet) fail(ErrorCode::kVocabTooLarge, "more than 65536 symbols");
  if (cum_.front() != 0 || cum_.back() != kCdfTotal) {
    fail(ErrorCode::kInvalidArgument, "CDF must start at 0 and end at 65536");
  }
  for (std::size_t k = 0; k + 1 < cum_.size(); ++k) {
    if (cum_[k + 1] <= cum_[k]) {
      fail(ErrorCode::kInvalidArgument, "CDF not strictly increasing at " + std::to_string(k));
    }
  }
}

QuantizedCdf QuantizedCdf::from_frequencies(std::span<const std::uint32_t> freqs) {
  std::vector<std::uint32_t> cum(freqs.size() + 1, 0);
  std::uint64_t running = 0;
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    running += freqs[k];
    cum[k + 1] = static_cast<std::uint32_t>(std::min<std::uint64_t>(running, 0xFFFFFFFFu));
  }
  return QuantizedCdf(std::move(cum));
}

std::uint32_t QuantizedCdf::find(std::uint32_t target) const {
  // First cum entry strictly greater than target, minus one.
  auto it = std::upper_bound(cum_.begin() + 1, cum_.end(), target);
  return static_cast<std::uint32_t>(it - cum_.begin() - 1);
}

std::vector<std::uint32_t> QuantizedCdf::frequencies() const {
  std::vector<std::uint32_t> out(alphabet_size());
  for (std::uint32_t k = 0; k < out.size(); ++k) out[k] = frequency(k);
  return out;
}

QuantizedCdf cdf_uniform(std::uint32_t vocab_size) {
  if (vocab_size > kMaxAlphabet) fail(ErrorCode::kVocabTooLarge, std::to_string(vocab_size));
  if (vocab_size < 2) fail(ErrorCode::kInvalidArgument, "vocabulary size must be >= 2");
  const std::uint32_t base = kCdfTotal / vocab_size;
  const std::uint32_t extra = kCdfTotal % vocab_size;
  std::vector<std::uint32_t> cum(vocab_size + 1, 0);
  for (std::uint32_t k = 0; k < vocab_size; ++k) {
    cum[k + 1] = cum[k] + base + (k < extra ? 1 : 0);
  }
  return QuantizedCdf(std::move(cum));
}

QuantizedCdf quantize_probs(std::span<const double> probs) {
  const std::size_t n = probs.size();
  if (n > kMaxAlphabet) fail(ErrorCode::kVocabTooLarge, std::to_string(n));
  if (n < 2) fail(ErrorCode::kInvalidArgument, "need at least two probabilities");
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(probs[k])) {
      fail(ErrorCode::kNonFiniteProbability, "probability " + std::to_string(k) + " is not finite");
    }
    if (probs[k] < 0.0) fail(ErrorCode::kInvalidArgument, "negative probability");
  }

  const double scale = static_cast<double>(kCdfTotal - n);
  std::vector<std::int64_t> freq(n);
  std::vector<double> shortfall(n);  // target share minus allocation
  std::int64_t total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = probs[k] * scale;
    const std::int64_t rounded = static_cast<std::int64_t>(std::floor(target + 0.5));
    freq[k] = std::max<std::int64_t>(1, rounded);
    shortfall[k] = target - static_cast<double>(freq[k]);
    total += freq[k];
  }

  std::int64_t diff = static_cast<std::int64_t>(kCdfTotal) - total;
  if (diff != 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (diff > 0) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return shortfall[a] > shortfall[b]; });
      while (diff > 0) {
        for (std::size_t idx : order) {
          if (diff == 0) break;
          ++freq[idx];
          --diff;
        }
      }
    } else {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (shortfall[a] != shortfall[b]) return shortfall[a] < shortfall[b];
        return a > b;
      });
      // Each pass visits, in order, only the entries that can still give.
      std::erase_if(order, [&](std::size_t idx) { return freq[idx] <= 1; });
      while (diff < 0) {
        if (order.empty()) fail(ErrorCode::kInvalidArgument, "cannot renormalise probabilities");
        for (std::size_t idx : order) {
          if (diff == 0) break;
          --freq[idx];
          ++diff;
        }
        std::erase_if(order, [&](std::size_t idx) { return freq[idx] <= 1; });
      }
    }
  }

  std::vector<std::uint32_t> cum(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) cum[k + 1] = cum[k] + static_cast<std::uint32_t>(freq[k]);
  return QuantizedCdf(std::move(cum));
}

QuantizedCdf quantize_counts(std::span<const std::uint32_t> counts) {
  const std::size_t n = counts.size();
  if (n > kMaxAlphabet) fail(ErrorCode::kVocabTooLarge, std::to_string(n));
  if (n < 2) fail(ErrorCode::kInvalidArgument, "need at least two counts");
  std::uint64_t sum = 0;
  for (std::uint32_t c : counts) {
    if (c == 0) fail(ErrorCode::kInvalidArgument, "counts must be positive");
    sum += c;
  }
  const std::uint64_t budget = kCdfTotal - n;
  std::vector<std::uint32_t> cum(n + 1, 0);
  std::uint64_t assigned = 0;
  std::vector<std::uint32_t> freq(n);
  for (std::size_t k = 0; k < n; ++k) {
    freq[k] = 1 + static_cast<std::uint32_t>(counts[k] * budget / sum);
    assigned += freq[k];
  }
  std::uint64_t leftover = kCdfTotal - assigned;
  for (std::size_t k = 0; k < n && leftover > 0; ++k, --leftover) ++freq[k];
  for (std::size_t k = 0; k < n; ++k) cum[k + 1] = cum[k] + freq[k];
  return QuantizedCdf(std::move(cum));
}

}  // namespace tokenlink
