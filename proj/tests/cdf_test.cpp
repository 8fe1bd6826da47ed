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

#include <gtest/gtest.h>

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "test_support.hpp"

namespace tokenlink {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_rational exact(double x) {
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  cpp_rational r(scaled);
  const int shift = exponent - 53;
  if (shift >= 0) return r * cpp_rational(cpp_int(1) << shift);
  return r / cpp_rational(cpp_int(1) << -shift);
}

cpp_int floor_rational(const cpp_rational& r) {
  cpp_int q = numerator(r) / denominator(r);
  if (r < 0 && q * denominator(r) != numerator(r)) --q;
  return q;
}

/// The quantization rule evaluated with exact rationals, independent of the
/// library's floating-point path.
std::vector<std::uint32_t> oracle_frequencies(const std::vector<double>& probs) {
  const std::size_t n = probs.size();
  const cpp_rational scale(65536 - static_cast<std::int64_t>(n));
  std::vector<cpp_int> freq(n);
  std::vector<cpp_rational> shortfall(n);
  cpp_int total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const cpp_rational target = exact(probs[k]) * scale;
    freq[k] = std::max<cpp_int>(1, floor_rational(target + cpp_rational(1, 2)));
    shortfall[k] = target - cpp_rational(freq[k]);
    total += freq[k];
  }
  cpp_int diff = cpp_int(65536) - total;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (diff > 0) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return shortfall[a] > shortfall[b]; });
    for (std::size_t i = 0; diff > 0; i = (i + 1) % n, --diff) ++freq[order[i]];
  } else if (diff < 0) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      if (shortfall[a] != shortfall[b]) return shortfall[a] < shortfall[b];
      return a > b;
    });
    while (diff < 0) {
      for (std::size_t idx : order) {
        if (diff == 0) break;
        if (freq[idx] > 1) {
          --freq[idx];
          ++diff;
        }
      }
    }
  }
  std::vector<std::uint32_t> out;
  for (const cpp_int& f : freq) out.push_back(static_cast<std::uint32_t>(f));
  return out;
}

void expect_valid(const QuantizedCdf& cdf) {
  const auto cum = cdf.cumulative();
  ASSERT_EQ(cum.front(), 0u);
  ASSERT_EQ(cum.back(), kCdfTotal);
  for (std::size_t k = 0; k + 1 < cum.size(); ++k) ASSERT_LT(cum[k], cum[k + 1]);
}

TEST(CdfUniform, ExactDivision) {
  const QuantizedCdf cdf = cdf_uniform(4);
  EXPECT_EQ(std::vector<std::uint32_t>(cdf.cumulative().begin(), cdf.cumulative().end()),
            (std::vector<std::uint32_t>{0, 16384, 32768, 49152, 65536}));
}

TEST(CdfUniform, Vocab8192HasFrequencyEight) {
  const auto freqs = cdf_uniform(8192).frequencies();
  EXPECT_TRUE(std::all_of(freqs.begin(), freqs.end(), [](std::uint32_t f) { return f == 8; }));
}

TEST(CdfUniform, RemainderGoesToLowestIds) {
  const QuantizedCdf cdf = cdf_uniform(3);
  EXPECT_EQ(cdf.frequencies(), (std::vector<std::uint32_t>{21846, 21845, 21845}));
  // Summation oracle.
  EXPECT_EQ(std::vector<std::uint32_t>(cdf.cumulative().begin(), cdf.cumulative().end()),
            (std::vector<std::uint32_t>{0, 21846, 21846 + 21845, 65536}));
}

TEST(CdfUniform, FrequenciesDifferByAtMostOne) {
  for (std::uint32_t v : {2u, 5u, 7u, 1000u, 4099u, 65535u, 65536u}) {
    const auto freqs = cdf_uniform(v).frequencies();
    const std::uint32_t base = kCdfTotal / v;
    for (std::uint32_t k = 0; k < v; ++k) {
      ASSERT_EQ(freqs[k], base + (k < kCdfTotal % v ? 1 : 0)) << "V=" << v << " k=" << k;
    }
  }
}

TEST(CdfUniform, Errors) {
  EXPECT_TOKENLINK_ERROR(cdf_uniform(65537), ErrorCode::kVocabTooLarge);
  EXPECT_TOKENLINK_ERROR(cdf_uniform(1), ErrorCode::kInvalidArgument);
}

TEST(QuantizeProbs, Symmetric) {
  EXPECT_EQ(quantize_probs(std::vector<double>{0.5, 0.5}).frequencies(),
            (std::vector<std::uint32_t>{32768, 32768}));
}

TEST(QuantizeProbs, MinimumFrequencyFloor) {
  EXPECT_EQ(quantize_probs(std::vector<double>{1.0, 0.0}).frequencies(),
            (std::vector<std::uint32_t>{65535, 1}));
}

TEST(QuantizeProbs, SeventyTwentyTenMatchesTheRationalOracle) {
  const std::vector<double> probs{0.7, 0.2, 0.1};
  const auto oracle = oracle_frequencies(probs);
  EXPECT_EQ(oracle, (std::vector<std::uint32_t>{45874, 13108, 6554}));
  EXPECT_EQ(quantize_probs(probs).frequencies(), oracle);
}

TEST(QuantizeProbs, RandomVectorsMatchTheRationalOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + uniform_below(rng, 60);
    std::vector<double> probs(n);
    double sum = 0.0;
    for (double& p : probs) {
      // Peaked vectors exercise the floor and the downward correction.
      p = std::pow(uniform_unit(rng), trial % 3 == 0 ? 8.0 : 1.0);
      sum += p;
    }
    for (double& p : probs) p /= sum;
    ASSERT_EQ(quantize_probs(probs).frequencies(), oracle_frequencies(probs)) << "trial " << trial;
  }
}

TEST(QuantizeProbs, UnnormalisedInputStillSumsToTotal) {
  expect_valid(quantize_probs(std::vector<double>{3.0, 1.0, 0.0, 0.0}));
  expect_valid(quantize_probs(std::vector<double>{0.01, 0.01, 0.01}));
  expect_valid(quantize_probs(std::vector<double>(5000, 0.0)));
}

TEST(QuantizeProbs, PreservesArgmax) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + uniform_below(rng, 300);
    std::vector<double> probs(n);
    for (double& p : probs) p = uniform_unit(rng);
    if (trial % 4 == 0) probs[uniform_below(rng, n)] = probs[uniform_below(rng, n)];
    const auto freqs = quantize_probs(probs).frequencies();
    const std::size_t best = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    const std::uint32_t top = *std::max_element(freqs.begin(), freqs.end());
    EXPECT_EQ(freqs[best], top) << "trial " << trial;
  }
}

TEST(QuantizeProbs, Errors) {
  EXPECT_TOKENLINK_ERROR(quantize_probs(std::vector<double>{0.5, std::numeric_limits<double>::quiet_NaN()}),
                         ErrorCode::kNonFiniteProbability);
  EXPECT_TOKENLINK_ERROR(quantize_probs(std::vector<double>{std::numeric_limits<double>::infinity(), 0.0}),
                         ErrorCode::kNonFiniteProbability);
  EXPECT_TOKENLINK_ERROR(quantize_probs(std::vector<double>{-0.1, 1.1}), ErrorCode::kInvalidArgument);
}

TEST(QuantizeCounts, ProportionalWithFloor) {
  const QuantizedCdf cdf = quantize_counts(std::vector<std::uint32_t>{1, 1, 2});
  expect_valid(cdf);
  const auto f = cdf.frequencies();
  // The rounding leftover goes to the lowest ids first.
  EXPECT_EQ(f[0], f[1] + 1);
  EXPECT_NEAR(static_cast<double>(f[2]) / f[0], 2.0, 1e-3);
}

TEST(QuantizedCdf, FindLocatesTheInterval) {
  const QuantizedCdf cdf = QuantizedCdf::from_frequencies(std::vector<std::uint32_t>{10, 65516, 10});
  EXPECT_EQ(cdf.find(0), 0u);
  EXPECT_EQ(cdf.find(9), 0u);
  EXPECT_EQ(cdf.find(10), 1u);
  EXPECT_EQ(cdf.find(65525), 1u);
  EXPECT_EQ(cdf.find(65526), 2u);
  EXPECT_EQ(cdf.find(65535), 2u);
}

TEST(QuantizedCdf, RejectsBrokenTables) {
  EXPECT_TOKENLINK_ERROR(QuantizedCdf({0, 65536}), ErrorCode::kInvalidArgument);
  EXPECT_TOKENLINK_ERROR(QuantizedCdf({0, 100, 100, 65536}), ErrorCode::kInvalidArgument);
  EXPECT_TOKENLINK_ERROR(QuantizedCdf({0, 100, 65535}), ErrorCode::kInvalidArgument);
  EXPECT_TOKENLINK_ERROR(QuantizedCdf({1, 100, 65536}), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace tokenlink
