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

#include "tokenlink/range_coder.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "tokenlink/entropy_model.hpp"

namespace tokenlink {
namespace {

using testing::random_ids;
using testing::random_mask;

/// A random valid CDF, sometimes heavily skewed.
QuantizedCdf random_cdf(std::mt19937_64& rng, std::uint32_t v) {
  std::vector<double> p(v);
  const double power = uniform_below(rng, 2) ? 6.0 : 1.0;
  double sum = 0.0;
  for (double& x : p) sum += (x = std::pow(uniform_unit(rng), power));
  for (double& x : p) x /= sum;
  return quantize_probs(p);
}

TEST(RangeCoder, UniformVocab8192CostsThirteenBitsPerSymbol) {
  std::mt19937_64 rng(1);
  const auto ids = random_ids(rng, 1024, 8192);
  const QuantizedCdf cdf = cdf_uniform(8192);
  RangeEncoder enc;
  for (TokenId id : ids) enc.encode(cdf, id);
  const Bytes out = enc.finish();
  EXPECT_GE(out.size(), 1664u);
  EXPECT_LE(out.size(), 1664u + 8u);
}

TEST(RangeCoder, RoundTripFixedSchedule) {
  std::mt19937_64 rng(2);
  const std::vector<TokenId> ids{3, 1, 4, 1, 5};
  std::vector<QuantizedCdf> cdfs;
  for (std::size_t i = 0; i < ids.size(); ++i) cdfs.push_back(random_cdf(rng, 8));
  RangeEncoder enc;
  for (std::size_t i = 0; i < ids.size(); ++i) enc.encode(cdfs[i], ids[i]);
  const Bytes out = enc.finish();
  RangeDecoder dec(out);
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(dec.decode(cdfs[i]), ids[i]);
  EXPECT_EQ(dec.bytes_consumed(), out.size());
}

TEST(RangeCoder, Deterministic) {
  std::mt19937_64 rng(3);
  const auto ids = random_ids(rng, 500, 100);
  const QuantizedCdf cdf = random_cdf(rng, 100);
  auto run = [&] {
    RangeEncoder enc;
    for (TokenId id : ids) enc.encode(cdf, id);
    return enc.finish();
  };
  EXPECT_EQ(run(), run());
}

TEST(RangeCoder, SymbolOutOfRange) {
  RangeEncoder enc;
  EXPECT_TOKENLINK_ERROR(enc.encode(cdf_uniform(16), 16), ErrorCode::kSymbolOutOfRange);
}

TEST(RangeCoder, StreamCutShortIsTruncated) {
  std::mt19937_64 rng(4);
  const auto ids = random_ids(rng, 200, 50);
  const QuantizedCdf cdf = cdf_uniform(50);
  RangeEncoder enc;
  for (TokenId id : ids) enc.encode(cdf, id);
  Bytes out = enc.finish();
  out.pop_back();
  EXPECT_TOKENLINK_ERROR(
      {
        RangeDecoder dec(out);
        for (std::size_t i = 0; i < ids.size(); ++i) dec.decode(cdf);
      },
      ErrorCode::kTruncatedStream);
  EXPECT_TOKENLINK_ERROR(RangeDecoder(ByteView(out.data(), 3)), ErrorCode::kTruncatedStream);
}

TEST(RangeCoder, EmptyStreamIsTailOnly) {
  RangeEncoder enc;
  const Bytes out = enc.finish();
  EXPECT_LE(out.size(), 8u);
  RangeDecoder dec(out);
  EXPECT_EQ(dec.bytes_consumed(), out.size());
}

TEST(RangeCoder, NearCertainSymbolCostsAlmostNothing) {
  const QuantizedCdf cdf = QuantizedCdf::from_frequencies(std::vector<std::uint32_t>{65535, 1});
  RangeEncoder enc;
  enc.encode(cdf, 0);
  const Bytes out = enc.finish();
  EXPECT_LE(out.size(), 9u);
  RangeDecoder dec(out);
  EXPECT_EQ(dec.decode(cdf), 0u);
}

TEST(RangeCoder, DoubleFinish) {
  RangeEncoder enc;
  enc.encode(cdf_uniform(4), 2);
  enc.finish();
  EXPECT_TOKENLINK_ERROR(enc.finish(), ErrorCode::kDoubleFinish);
}

TEST(RangeCoder, CarryPropagationSurvivesExtremeIntervals) {
  // Always coding the top symbol of a skewed CDF keeps low near the top of
  // the range and forces long runs of pending 0xFF bytes.
  const QuantizedCdf top = QuantizedCdf::from_frequencies(std::vector<std::uint32_t>{1, 65535});
  const QuantizedCdf tiny_top = QuantizedCdf::from_frequencies(std::vector<std::uint32_t>{65535, 1});
  std::vector<std::pair<const QuantizedCdf*, TokenId>> schedule;
  for (int i = 0; i < 5000; ++i) schedule.emplace_back(i % 7 == 3 ? &tiny_top : &top, 1);
  RangeEncoder enc;
  for (auto& [cdf, s] : schedule) enc.encode(*cdf, s);
  const Bytes out = enc.finish();
  RangeDecoder dec(out);
  for (auto& [cdf, s] : schedule) ASSERT_EQ(dec.decode(*cdf), s);
  EXPECT_EQ(dec.bytes_consumed(), out.size());
}

TEST(RangeCoderProperty, RoundTripAndRateBoundOverRandomSchedules) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = trial == 0 ? 0 : (trial == 1 ? 8192 : uniform_below(rng, 3000));
    const std::uint32_t v = 2 + static_cast<std::uint32_t>(uniform_below(rng, trial % 5 == 0 ? 60000 : 300));
    std::vector<QuantizedCdf> pool;
    for (int k = 0; k < 4; ++k) pool.push_back(random_cdf(rng, v));
    std::vector<std::size_t> which;
    std::vector<TokenId> ids;
    for (std::size_t i = 0; i < n; ++i) {
      which.push_back(uniform_below(rng, pool.size()));
      // Draw from the CDF itself half the time so likely symbols dominate.
      ids.push_back(uniform_below(rng, 2)
                        ? pool[which.back()].find(static_cast<std::uint32_t>(uniform_below(rng, kCdfTotal)))
                        : static_cast<TokenId>(uniform_below(rng, v)));
    }
    RangeEncoder enc;
    for (std::size_t i = 0; i < n; ++i) enc.encode(pool[which[i]], ids[i]);
    const Bytes out = enc.finish();
    RangeDecoder dec(out);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(dec.decode(pool[which[i]]), ids[i]) << "trial " << trial << " i " << i;
    }
    EXPECT_EQ(dec.bytes_consumed(), out.size());
    double ce = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ce -= std::log2(static_cast<double>(pool[which[i]].frequency(ids[i])) / kCdfTotal);
    }
    const double payload = 8.0 * static_cast<double>(out.size());
    EXPECT_LE(payload, ce + 64.0) << "trial " << trial;
    EXPECT_GE(payload, ce - 64.0) << "trial " << trial;
  }
}

TEST(MaskBits, PackedMostSignificantBitFirst) {
  EXPECT_EQ(encode_mask_bits(BinaryMask({1, 0, 1, 1, 0, 0, 0, 0})), (Bytes{0xB0}));
  EXPECT_EQ(encode_mask_bits(BinaryMask({1, 0, 1})), (Bytes{0xA0}));
  EXPECT_TRUE(encode_mask_bits(BinaryMask()).empty());
}

TEST(MaskBits, OneBitPerPosition) {
  std::mt19937_64 rng(6);
  EXPECT_EQ(encode_mask_bits(random_mask(rng, 1024)).size(), 128u);
}

TEST(MaskBits, RoundTripAllLengths) {
  std::mt19937_64 rng(7);
  for (std::size_t n = 1; n <= 4096; n += (n < 64 ? 1 : 37)) {
    const BinaryMask m = random_mask(rng, n, uniform_unit(rng));
    const Bytes b = encode_mask_bits(m);
    ASSERT_EQ(b.size(), (n + 7) / 8);
    ASSERT_EQ(decode_mask_bits(b, n), m) << n;
  }
  const BinaryMask m = random_mask(rng, 4096);
  EXPECT_EQ(decode_mask_bits(encode_mask_bits(m), 4096), m);
}

TEST(MaskBits, LengthMismatch) {
  EXPECT_TOKENLINK_ERROR(decode_mask_bits(Bytes{0xB0}, 9), ErrorCode::kLengthMismatch);
  EXPECT_TOKENLINK_ERROR(decode_mask_bits(Bytes{0xB0, 0x00}, 8), ErrorCode::kLengthMismatch);
}

}  // namespace
}  // namespace tokenlink
