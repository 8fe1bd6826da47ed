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

#include "tokenlink/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "tokenlink/rng.hpp"

namespace tokenlink {

namespace {

double squared_distance(const Patch& a, const Patch& b) {
  double d = 0.0;
  for (std::uint32_t i = 0; i < kPatchPixels; ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

void check_dims(std::uint32_t width, std::uint32_t height) {
  if (width == 0 || height == 0 || width % kPatchSize != 0 || height % kPatchSize != 0) {
    fail(ErrorCode::kBadDimensions, std::to_string(width) + "x" + std::to_string(height) +
                                        " is not a positive multiple of the patch size");
  }
}

std::size_t nearest_index(const std::vector<Patch>& entries, const Patch& patch) {
  std::size_t best = 0;
  double best_d = squared_distance(entries[0], patch);
  for (std::size_t k = 1; k < entries.size(); ++k) {
    const double d = squared_distance(entries[k], patch);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

}  // namespace

PatchCodebook::PatchCodebook(std::vector<Patch> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) fail(ErrorCode::kInvalidArgument, "codebook needs at least one entry");
  for (const Patch& p : entries_) {
    for (double v : p) {
      if (v != std::round(v) || v < 0.0 || v > 255.0) {
        fail(ErrorCode::kInvalidArgument, "codebook entries must be integers in [0, 255]");
      }
    }
  }
}

Patch extract_patch(const GrayImage& img, std::uint32_t patch_x, std::uint32_t patch_y) {
  Patch p{};
  for (std::uint32_t y = 0; y < kPatchSize; ++y) {
    for (std::uint32_t x = 0; x < kPatchSize; ++x) {
      p[y * kPatchSize + x] = img.at(patch_x * kPatchSize + x, patch_y * kPatchSize + y);
    }
  }
  return p;
}

PatchCodebook PatchCodebook::train(std::span<const GrayImage> images, std::uint64_t seed,
                                   std::uint32_t size, std::uint32_t iterations) {
  if (size == 0) fail(ErrorCode::kInvalidArgument, "codebook size must be positive");
  std::vector<Patch> samples;
  for (const GrayImage& img : images) {
    check_dims(img.width(), img.height());
    for (std::uint32_t py = 0; py < img.height() / kPatchSize; ++py) {
      for (std::uint32_t px = 0; px < img.width() / kPatchSize; ++px) {
        samples.push_back(extract_patch(img, px, py));
      }
    }
  }
  if (samples.empty()) fail(ErrorCode::kInvalidArgument, "no training patches");

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[uniform_below(rng, i)]);
  }
  std::vector<Patch> centroids;
  std::set<Patch> seen;
  for (std::size_t idx : order) {
    if (centroids.size() == size) break;
    if (seen.insert(samples[idx]).second) centroids.push_back(samples[idx]);
  }
  // Fewer distinct patches than entries: pad with random patches.
  while (centroids.size() < size) {
    Patch p{};
    for (double& v : p) v = static_cast<double>(uniform_below(rng, 256));
    centroids.push_back(p);
  }

  std::vector<std::size_t> assignment(samples.size(), 0);
  for (std::uint32_t it = 0; it < iterations; ++it) {
    bool changed = it == 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::size_t k = nearest_index(centroids, samples[i]);
      if (k != assignment[i]) changed = true;
      assignment[i] = k;
    }
    if (!changed) break;
    std::vector<Patch> sums(size, Patch{});
    std::vector<std::size_t> counts(size, 0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      Patch& s = sums[assignment[i]];
      for (std::uint32_t j = 0; j < kPatchPixels; ++j) s[j] += samples[i][j];
      ++counts[assignment[i]];
    }
    for (std::uint32_t k = 0; k < size; ++k) {
      if (counts[k] == 0) continue;  // empty clusters keep their centroid
      for (std::uint32_t j = 0; j < kPatchPixels; ++j) {
        centroids[k][j] = sums[k][j] / static_cast<double>(counts[k]);
      }
    }
  }
  for (Patch& p : centroids) {
    for (double& v : p) v = std::clamp(std::round(v), 0.0, 255.0);
  }
  return PatchCodebook(std::move(centroids));
}

TokenId PatchCodebook::nearest(const Patch& patch) const {
  return static_cast<TokenId>(nearest_index(entries_, patch));
}

TokenSequence mock_tokenize(const GrayImage& img, const PatchCodebook& codebook) {
  check_dims(img.width(), img.height());
  std::vector<TokenId> ids;
  ids.reserve(img.pixel_count() / kPatchPixels);
  for (std::uint32_t py = 0; py < img.height() / kPatchSize; ++py) {
    for (std::uint32_t px = 0; px < img.width() / kPatchSize; ++px) {
      ids.push_back(codebook.nearest(extract_patch(img, px, py)));
    }
  }
  return TokenSequence(codebook.vocabulary(), std::move(ids));
}

GrayImage mock_detokenize(const TokenSequence& tokens, const PatchCodebook& codebook,
                          std::uint32_t width, std::uint32_t height) {
  check_dims(width, height);
  const std::uint32_t cols = width / kPatchSize;
  if (tokens.size() != std::size_t{cols} * (height / kPatchSize)) {
    fail(ErrorCode::kLengthMismatch, std::to_string(tokens.size()) + " tokens for a " +
                                         std::to_string(width) + "x" + std::to_string(height) +
                                         " image");
  }
  GrayImage out = GrayImage::filled(width, height, 0);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const Patch& p = codebook.entry(tokens[t]);
    const std::uint32_t px = static_cast<std::uint32_t>(t % cols);
    const std::uint32_t py = static_cast<std::uint32_t>(t / cols);
    for (std::uint32_t y = 0; y < kPatchSize; ++y) {
      for (std::uint32_t x = 0; x < kPatchSize; ++x) {
        out.at(px * kPatchSize + x, py * kPatchSize + y) =
            static_cast<std::uint8_t>(std::clamp(std::round(p[y * kPatchSize + x]), 0.0, 255.0));
      }
    }
  }
  return out;
}

std::vector<double> patch_variance(const GrayImage& img) {
  check_dims(img.width(), img.height());
  std::vector<double> out;
  for (std::uint32_t py = 0; py < img.height() / kPatchSize; ++py) {
    for (std::uint32_t px = 0; px < img.width() / kPatchSize; ++px) {
      const Patch p = extract_patch(img, px, py);
      double mean = 0.0;
      for (double v : p) mean += v;
      mean /= kPatchPixels;
      double var = 0.0;
      for (double v : p) var += (v - mean) * (v - mean);
      out.push_back(var / kPatchPixels);
    }
  }
  return out;
}

}  // namespace tokenlink
