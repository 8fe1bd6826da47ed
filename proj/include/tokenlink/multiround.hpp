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
#include <string>
#include <vector>

#include "tokenlink/codebook.hpp"
#include "tokenlink/image.hpp"
#include "tokenlink/protocol.hpp"
#include "tokenlink/text_codec.hpp"

namespace tokenlink {

enum class Pipeline : std::uint8_t { kToken, kPixel };

std::string_view pipeline_name(Pipeline p);

/// Shared, read-only simulation state: the patch tokenizer, the text
/// tokenizer and prompt pool, and the entropy-model weights.
struct SimulationContext {
  PatchCodebook codebook;
  WordTokenizer tokenizer;
  std::vector<std::string> prompts;
  ModelSuite models;
};

/// Fixture images (*.pgm under `images_dir`, sorted by name), a codebook
/// trained on them with `seed`, and a tokenizer trained on 1000 synthetic
/// prompts.
SimulationContext make_simulation_context(const std::vector<GrayImage>& images, std::uint64_t seed,
                                          ModelSuite models = {});
std::vector<GrayImage> load_fixture_images(const std::filesystem::path& images_dir);

struct MultiroundConfig {
  Task task = Task::kInpaint;
  std::size_t rounds = 5;
  bool token_pipeline = true;
  bool pixel_pipeline = true;
  std::uint64_t seed = 0;
  int pixel_quality = 6;
};

struct RoundRecord {
  std::size_t round = 0;
  Pipeline pipeline = Pipeline::kToken;
  /// Uplink plus downlink bytes over the source frame's pixel count.
  double bpp = 0.0;
  double psnr_db = 0.0;
  /// The edge's image after this round.
  GrayImage reconstruction;
};

struct MultiroundReport {
  std::vector<RoundRecord> rows;

  /// "round,pipeline,bpp,psnr_db" with fixed six-decimal formatting.
  std::string to_csv() const;
  std::string to_table() const;
};

/// Runs `rounds` edge-cloud exchanges of `source` per enabled pipeline.
///
/// Token pipeline: the image is tokenized once; each round is one protocol
/// session on the edge's current tokens. Pixel pipeline: each round passes
/// the edge's current image through the lossy codec on the uplink (phase
/// 2r) and the cloud's result through it on the downlink (phase 2r + 1);
/// the cloud tokenizes what it received to drive the generator and keeps
/// the received pixels outside the generated region. VQA and later T2I
/// rounds relay the image back with the reply.
///
/// PSNR is taken against the source over the region the task preserves
/// (unmasked patches for inpainting, the original frame for outpainting,
/// the whole image for VQA) and, for T2I, against the cloud's rendering of
/// the first generated image.
///
/// Throws InvalidArgument when rounds == 0.
MultiroundReport run_multiround(const MultiroundConfig& config, const GrayImage& source,
                                const SimulationContext& ctx);

/// The inpainting mask used by the simulator: a seeded rectangle of about
/// 40% of the patch grid.
BinaryMask simulation_mask(std::uint32_t cols, std::uint32_t rows, std::uint64_t seed);

}  // namespace tokenlink
