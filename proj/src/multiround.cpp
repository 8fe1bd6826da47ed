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

#include "tokenlink/multiround.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "tokenlink/generator.hpp"
#include "tokenlink/pixel_codec.hpp"
#include "tokenlink/rng.hpp"

namespace tokenlink {

std::string_view pipeline_name(Pipeline p) { return p == Pipeline::kToken ? "token" : "pixel"; }

SimulationContext make_simulation_context(const std::vector<GrayImage>& images, std::uint64_t seed,
                                          ModelSuite models) {
  std::vector<std::string> prompts = synthetic_prompts(1000, seed);
  WordTokenizer tokenizer = WordTokenizer::train(prompts);
  return SimulationContext{PatchCodebook::train(images, seed), std::move(tokenizer), std::move(prompts),
                           std::move(models)};
}

std::vector<GrayImage> load_fixture_images(const std::filesystem::path& images_dir) {
  std::vector<std::filesystem::path> paths;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(images_dir, ec)) {
    if (entry.path().extension() == ".pgm") paths.push_back(entry.path());
  }
  if (ec) fail(ErrorCode::kIoError, "cannot list " + images_dir.string() + ": " + ec.message());
  std::sort(paths.begin(), paths.end());
  std::vector<GrayImage> images;
  for (const auto& p : paths) images.push_back(load_pgm(p));
  return images;
}

BinaryMask simulation_mask(std::uint32_t cols, std::uint32_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(KeyHasher(seed).add(0x4D41534B).value());
  const std::uint32_t w = std::max<std::uint32_t>(1, (cols * 5 + 7) / 8);
  const std::uint32_t h = std::max<std::uint32_t>(1, (rows * 5 + 7) / 8);
  const std::uint32_t x0 = static_cast<std::uint32_t>(uniform_below(rng, cols - w + 1));
  const std::uint32_t y0 = static_cast<std::uint32_t>(uniform_below(rng, rows - h + 1));
  std::vector<std::uint8_t> bits(std::size_t{cols} * rows, 0);
  for (std::uint32_t y = y0; y < y0 + h; ++y) {
    for (std::uint32_t x = x0; x < x0 + w; ++x) bits[std::size_t{y} * cols + x] = 1;
  }
  return BinaryMask(std::move(bits));
}

namespace {

/// Per-pixel flags from per-patch flags.
std::vector<std::uint8_t> pixel_flags(const BinaryMask& patches, std::uint32_t width,
                                      std::uint32_t height, bool masked_value) {
  const std::uint32_t cols = width / kPatchSize;
  std::vector<std::uint8_t> out(std::size_t{width} * height);
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < width; ++x) {
      const bool masked = patches[std::size_t{y / kPatchSize} * cols + x / kPatchSize];
      out[std::size_t{y} * width + x] = masked == masked_value ? 1 : 0;
    }
  }
  return out;
}

struct Experiment {
  const MultiroundConfig& config;
  const GrayImage& source;
  const SimulationContext& ctx;
  std::uint32_t width;
  std::uint32_t height;
  std::uint32_t cols;
  std::uint32_t rows;
  std::uint32_t extension_rows;
  TokenSequence text;
  BinaryMask mask;
  MockGenerator generator;
  GenerationParams params;
  std::vector<std::uint8_t> region;

  Experiment(const MultiroundConfig& c, const GrayImage& s, const SimulationContext& x)
      : config(c),
        source(s),
        ctx(x),
        width(s.width()),
        height(s.height()),
        cols(s.width() / kPatchSize),
        rows(s.height() / kPatchSize),
        extension_rows(std::max<std::uint32_t>(1, rows / 2)),
        text(x.tokenizer.encode(x.prompts.at(c.seed % x.prompts.size()))),
        mask(simulation_mask(cols, rows, c.seed)),
        generator(c.seed) {
    params.image_tokens = std::size_t{cols} * rows;
    params.image_vocab = ctx.codebook.size();
    params.outpaint_extension = std::size_t{extension_rows} * cols;
    region = config.task == Task::kInpaint ? pixel_flags(mask, width, height, false)
                                           : std::vector<std::uint8_t>(source.pixel_count(), 1);
  }

  SessionOptions session_options() const { return SessionOptions{params.outpaint_extension}; }

  GrayImage detokenize(const TokenSequence& t, std::uint32_t h) const {
    return mock_detokenize(t, ctx.codebook, width, h);
  }

  double measure(const GrayImage& edge_view, const GrayImage& reference) const {
    return psnr_region(crop(edge_view, 0, 0, width, height), reference, region);
  }

  double rate(std::size_t bytes) const { return bpp(bytes, width, height); }

  void run_token(MultiroundReport& report) const {
    TokenSequence current = mock_tokenize(source, ctx.codebook);
    GrayImage reference = source;
    for (std::size_t r = 1; r <= config.rounds; ++r) {
      EdgeSession edge(config.task, ctx.models, session_options());
      CloudSession cloud(config.task, ctx.models, session_options());
      EdgeInputs in{text, std::nullopt, std::nullopt};
      if (config.task != Task::kTextToImage) in.image = current;
      if (config.task == Task::kInpaint) in.mask = mask;
      const Bytes up = edge.encode_uplink(in);
      const UplinkContents contents = cloud.decode_uplink(up);
      const TokenSequence output = mock_cloud_generate(generator, config.task, contents, params);
      const Bytes down = cloud.encode_downlink(output);
      const TokenSequence result = edge.decode_downlink(down);

      GrayImage view;
      switch (config.task) {
        case Task::kTextToImage:
          if (r == 1) reference = detokenize(output, height);
          current = result;
          view = detokenize(result, height);
          break;
        case Task::kInpaint:
          current = result;
          view = detokenize(result, height);
          break;
        case Task::kOutpaint:
          current = TokenSequence(result.vocab(), std::vector<TokenId>(result.ids().begin(),
                                                                       result.ids().begin() + current.size()));
          view = detokenize(result, height + extension_rows * kPatchSize);
          break;
        case Task::kVqa:
          view = detokenize(current, height);
          break;
      }
      report.rows.push_back(RoundRecord{r, Pipeline::kToken, rate(up.size() + down.size()),
                                        measure(view, reference), view});
    }
  }

  void run_pixel(MultiroundReport& report) const {
    const std::size_t text_bytes = compress_text_tokens(text).compressed.size();
    GrayImage current = source;
    GrayImage reference = source;
    const int q = config.pixel_quality;
    for (std::size_t r = 1; r <= config.rounds; ++r) {
      const std::uint32_t up_phase = static_cast<std::uint32_t>(2 * (r - 1));
      const std::uint32_t down_phase = up_phase + 1;
      UplinkContents contents;
      contents.task_token = static_cast<std::uint8_t>(config.task);
      contents.text = text;
      std::size_t bytes = 0;
      GrayImage received;
      if (config.task != Task::kTextToImage || r > 1) {
        PixelCodecResult up = lossy_pixel_codec(current, q, up_phase);
        bytes += up.bytes.size();
        received = std::move(up.reconstruction);
      }
      if (config.task != Task::kTextToImage || r == 1) bytes += text_bytes;

      GrayImage reply;
      switch (config.task) {
        case Task::kTextToImage:
          if (r == 1) {
            reply = detokenize(mock_cloud_generate(generator, config.task, contents, params), height);
            reference = reply;
          } else {
            reply = received;
          }
          break;
        case Task::kInpaint: {
          contents.masked_image = apply_mask(mock_tokenize(received, ctx.codebook), mask);
          const TokenSequence generated = mock_cloud_generate(generator, config.task, contents, params);
          const GrayImage filled = detokenize(merge_generated(*contents.masked_image, generated), height);
          const std::vector<std::uint8_t> masked_pixels = pixel_flags(mask, width, height, true);
          std::vector<std::uint8_t> samples = received.samples();
          for (std::size_t i = 0; i < samples.size(); ++i) {
            if (masked_pixels[i]) samples[i] = filled.samples()[i];
          }
          reply = GrayImage(width, height, std::move(samples));
          break;
        }
        case Task::kOutpaint: {
          contents.image = mock_tokenize(received, ctx.codebook);
          const TokenSequence ext = mock_cloud_generate(generator, config.task, contents, params);
          reply = stack_vertical(received, detokenize(ext, extension_rows * kPatchSize));
          break;
        }
        case Task::kVqa: {
          contents.image = mock_tokenize(received, ctx.codebook);
          const TokenSequence answer = mock_cloud_generate(generator, config.task, contents, params);
          bytes += compress_text_tokens(answer).compressed.size();
          reply = received;
          break;
        }
      }
      PixelCodecResult down = lossy_pixel_codec(reply, q, down_phase);
      bytes += down.bytes.size();
      current = crop(down.reconstruction, 0, 0, width, height);
      report.rows.push_back(RoundRecord{r, Pipeline::kPixel, rate(bytes),
                                        measure(down.reconstruction, reference),
                                        std::move(down.reconstruction)});
    }
  }
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

MultiroundReport run_multiround(const MultiroundConfig& config, const GrayImage& source,
                                const SimulationContext& ctx) {
  if (config.rounds == 0) fail(ErrorCode::kInvalidArgument, "rounds must be at least 1");
  if (source.width() % kPatchSize != 0 || source.height() % kPatchSize != 0 || source.pixel_count() == 0) {
    fail(ErrorCode::kBadDimensions, "source dimensions must be multiples of the patch size");
  }
  const Experiment e(config, source, ctx);
  MultiroundReport report;
  if (config.token_pipeline) e.run_token(report);
  if (config.pixel_pipeline) e.run_pixel(report);
  return report;
}

std::string MultiroundReport::to_csv() const {
  std::string out = "round,pipeline,bpp,psnr_db\n";
  for (const RoundRecord& row : rows) {
    out += std::to_string(row.round) + "," + std::string(pipeline_name(row.pipeline)) + "," +
           format_double(row.bpp) + "," + format_double(row.psnr_db) + "\n";
  }
  return out;
}

std::string MultiroundReport::to_table() const {
  std::string out = "round  pipeline        bpp    psnr_db\n";
  for (const RoundRecord& row : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%5zu  %-8s  %9.5f  %9.4f\n", row.round,
                  std::string(pipeline_name(row.pipeline)).c_str(), row.bpp, row.psnr_db);
    out += buf;
  }
  return out;
}

}  // namespace tokenlink
