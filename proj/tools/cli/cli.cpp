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

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "tokenlink/bench.hpp"
#include "tokenlink/image.hpp"
#include "tokenlink/multiround.hpp"
#include "tokenlink/protocol.hpp"
#include "tokenlink/token_file.hpp"
#include "tokenlink/weights.hpp"
#include "tokenlink/wire.hpp"

#ifndef TOKENLINK_DEFAULT_FIXTURES
#define TOKENLINK_DEFAULT_FIXTURES "fixtures"
#endif

namespace tokenlink::cli {

namespace {

namespace fs = std::filesystem;

/// An error raised while parsing a received stream rather than local input.
struct CorruptStream {
  Error error;
};

template <typename F>
auto parse_stream(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::kIoError:
      case ErrorCode::kMissingModel:
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kStateError:
        throw;
      default:
        throw CorruptStream{e};
    }
  }
}

fs::path fixture_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("UNIMIC_FIXTURES"); env && *env) return env;
  return TOKENLINK_DEFAULT_FIXTURES;
}

ModelSuite load_suite(const std::vector<std::string>& files, bool force_uniform) {
  ModelSuite suite;
  suite.force_uniform = force_uniform;
  for (const std::string& f : files) {
    auto w = std::make_shared<const EntropyModelWeights>(load_weights(f));
    switch (w->mode()) {
      case ModelMode::kAutoregressive: suite.autoregressive = w; break;
      case ModelMode::kMasked: suite.masked = w; break;
      case ModelMode::kTextConditional: suite.text_conditional = w; break;
    }
  }
  return suite;
}

std::string format_bpp(const fs::path& path, std::size_t bytes, std::uint32_t width,
                       std::uint32_t height) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: %zu bytes, %.6f bpp over %ux%u\n", path.string().c_str(), bytes,
                bpp(bytes, width, height), width, height);
  return buf;
}

Modality output_modality(Task task) { return task == Task::kVqa ? Modality::kText : Modality::kImage; }

struct SessionFlags {
  std::vector<std::string> weights;
  bool uniform = false;
  std::optional<std::size_t> extension;

  void attach(CLI::App* cmd) {
    cmd->add_option("--weights", weights, "UMEW weight file (repeatable; mode read from the file)")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--uniform", uniform, "code every image frame with the uniform model");
    cmd->add_option("--outpaint-extension", extension, "outpaint extension length in tokens");
  }
  SessionOptions options() const { return SessionOptions{extension}; }
};

/// Recovers the inputs the edge held from its own uplink message. Masked
/// positions, never transmitted, come back as id 0; they are masked again
/// before any use.
EdgeInputs edge_inputs_from(const UplinkContents& up) {
  EdgeInputs in;
  in.text = up.text;
  if (up.image) in.image = up.image;
  if (up.masked_image) {
    const MaskedSequence& m = *up.masked_image;
    std::vector<TokenId> ids(m.ids().begin(), m.ids().end());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (m.mask()[i]) ids[i] = 0;
    }
    in.image = TokenSequence(Vocabulary::image(m.vocab().size()), std::move(ids));
    in.mask = m.mask();
  }
  return in;
}

void hex_line(std::ostream& out, std::size_t offset, ByteView bytes, const std::string& note) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08zx ", offset);
  out << buf;
  for (std::size_t i = 0; i < 16; ++i) {
    if (i < bytes.size()) {
      std::snprintf(buf, sizeof buf, " %02x", bytes[i]);
      out << buf;
    } else {
      out << "   ";
    }
  }
  if (!note.empty()) out << "  " << note;
  out << "\n";
}

void hex_dump(std::ostream& out, std::size_t offset, ByteView bytes, const std::string& note) {
  for (std::size_t i = 0; i < bytes.size() || i == 0; i += 16) {
    hex_line(out, offset + i, bytes.subspan(i, std::min<std::size_t>(16, bytes.size() - i)),
             i == 0 ? note : std::string());
    if (bytes.empty()) break;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tokenlink: token-level edge/cloud coding toolkit", "tokenlink"};
  app.require_subcommand(1);
  std::string fixtures_flag;
  app.add_option("--fixtures", fixtures_flag, "fixture root (default: $UNIMIC_FIXTURES or the source tree)");

  // encode
  auto* encode = app.add_subcommand("encode", "build an uplink (edge) or downlink (cloud) message");
  std::string task_str, text_file, image_file, mask_file, uplink_file, generated_file, output_file;
  std::uint32_t width = 512, height = 512;
  SessionFlags enc_flags;
  encode->add_option("--task", task_str, "t2i | inpaint | outpaint | vqa")->required();
  encode->add_option("--text", text_file, "text tokens (UMTK)");
  encode->add_option("--image", image_file, "image tokens (UMTK)");
  encode->add_option("--mask", mask_file, "inpainting mask (UMTK, 2 symbols)");
  encode->add_option("--uplink", uplink_file, "received uplink; selects downlink encoding");
  encode->add_option("--generated", generated_file, "cloud output tokens for the downlink (UMTK)");
  encode->add_option("-o,--output", output_file, "message file to write")->required();
  encode->add_option("--width", width, "frame width for the bpp line")->check(CLI::PositiveNumber);
  encode->add_option("--height", height, "frame height for the bpp line")->check(CLI::PositiveNumber);
  enc_flags.attach(encode);

  // decode
  auto* decode = app.add_subcommand("decode", "decode an uplink (cloud) or downlink (edge) message");
  std::string input_file, out_dir = ".", dec_task, dec_uplink, result_file;
  SessionFlags dec_flags;
  decode->add_option("-i,--input", input_file, "message file")->required();
  decode->add_option("--task", dec_task, "expected task");
  decode->add_option("--uplink", dec_uplink, "the edge's own uplink, needed for downlinks");
  decode->add_option("--out-dir", out_dir, "directory for decoded token files");
  decode->add_option("-o,--output", result_file, "downlink result file (default <out-dir>/result.umtk)");
  decode->add_option("--width", width)->check(CLI::PositiveNumber);
  decode->add_option("--height", height)->check(CLI::PositiveNumber);
  dec_flags.attach(decode);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "multi-round token vs pixel degradation experiment");
  std::string sim_task = "inpaint", pipeline = "both", csv_file;
  std::size_t rounds = 5;
  std::uint64_t seed = 0;
  int quality = 6;
  std::optional<std::size_t> image_index;
  bool table = false;
  SessionFlags sim_flags;
  simulate->add_option("--task", sim_task, "t2i | inpaint | outpaint | vqa");
  simulate->add_option("--rounds", rounds, "edge-cloud rounds")->check(CLI::Range(std::size_t{1}, std::size_t{1000}));
  simulate->add_option("--pipeline", pipeline, "token | pixel | both")
      ->check(CLI::IsMember({"token", "pixel", "both"}));
  simulate->add_option("--seed", seed);
  simulate->add_option("--quality", quality, "pixel codec quality")->check(CLI::Range(1, 10));
  simulate->add_option("--image-index", image_index, "fixture image (default: seed mod count)");
  simulate->add_option("-o,--output", csv_file, "CSV file (default: standard output)");
  simulate->add_flag("--table", table, "also print a table");
  sim_flags.attach(simulate);

  // bench
  auto* bench = app.add_subcommand("bench", "code the held-out corpus under every entropy model");
  std::string weights_dir, corpus_dir, bench_csv;
  std::uint64_t bench_seed = 0;
  bench->add_option("--weights-dir", weights_dir, "directory holding w_ar/w_masked/w_textcond.umew");
  bench->add_option("--corpus-dir", corpus_dir, "directory holding heldout.{text,image}.umtk");
  bench->add_option("--seed", bench_seed);
  bench->add_option("--csv", bench_csv, "also write the table as CSV");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "hex-dump a message with frame annotations");
  std::string inspect_file;
  inspect->add_option("input", inspect_file, "message file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInputError;
  }

  const fs::path root = fixture_root(fixtures_flag);
  try {
    if (encode->parsed()) {
      const Task task = parse_task(task_str);
      const ModelSuite suite = load_suite(enc_flags.weights, enc_flags.uniform);
      Bytes message;
      if (!uplink_file.empty()) {
        if (generated_file.empty()) fail(ErrorCode::kInvalidArgument, "--generated is required with --uplink");
        const Bytes up = read_file(uplink_file);
        CloudSession cloud(task, suite, enc_flags.options());
        parse_stream([&] { return cloud.decode_uplink(up); });
        message = cloud.encode_downlink(load_tokens(generated_file, output_modality(task)));
      } else {
        EdgeInputs in;
        if (!text_file.empty()) in.text = load_tokens(text_file, Modality::kText);
        if (!image_file.empty()) in.image = load_tokens(image_file, Modality::kImage);
        if (!mask_file.empty()) in.mask = load_mask(mask_file);
        EdgeSession edge(task, suite, enc_flags.options());
        message = edge.encode_uplink(in);
      }
      write_file(output_file, message);
      out << format_bpp(output_file, message.size(), width, height);
      return kExitOk;
    }

    if (decode->parsed()) {
      const ModelSuite suite = load_suite(dec_flags.weights, dec_flags.uniform);
      const Bytes bytes = read_file(input_file);
      const MessageHeader header = parse_stream([&] { return read_message(bytes).header; });
      if (!dec_task.empty() && parse_task(dec_task) != header.task) {
        throw CorruptStream{Error(ErrorCode::kTaskMismatch,
                                  "message is for task " + std::string(task_name(header.task)))};
      }
      fs::create_directories(out_dir);
      if (header.direction == Direction::kUplink) {
        CloudSession cloud(header.task, suite, dec_flags.options());
        const UplinkContents up = parse_stream([&] { return cloud.decode_uplink(bytes); });
        save_tokens(*up.text, fs::path(out_dir) / "text.umtk");
        out << "text: " << up.text->size() << " tokens\n";
        if (up.image) {
          save_tokens(*up.image, fs::path(out_dir) / "image.umtk");
          out << "image: " << up.image->size() << " tokens\n";
        }
        if (up.masked_image) {
          const MaskedSequence& m = *up.masked_image;
          save_mask(m.mask(), fs::path(out_dir) / "mask.umtk");
          std::vector<TokenId> visible;
          for (std::size_t i = 0; i < m.size(); ++i) {
            if (!m.mask()[i]) visible.push_back(m.ids()[i]);
          }
          save_tokens(TokenSequence(Vocabulary::image(m.vocab().size()), std::move(visible)),
                      fs::path(out_dir) / "visible.umtk");
          out << "mask: " << m.size() << " positions, " << m.mask().ones_count() << " masked\n";
        }
      } else {
        if (dec_uplink.empty()) fail(ErrorCode::kInvalidArgument, "--uplink is required to decode a downlink");
        const Bytes up_bytes = read_file(dec_uplink);
        CloudSession replay(header.task, suite, dec_flags.options());
        const UplinkContents up = parse_stream([&] { return replay.decode_uplink(up_bytes); });
        EdgeSession edge(header.task, suite, dec_flags.options());
        (void)edge.encode_uplink(edge_inputs_from(up));
        const TokenSequence result = parse_stream([&] { return edge.decode_downlink(bytes); });
        const fs::path target = result_file.empty() ? fs::path(out_dir) / "result.umtk" : fs::path(result_file);
        save_tokens(result, target);
        out << "result: " << result.size() << " tokens -> " << target.string() << "\n";
      }
      out << format_bpp(input_file, bytes.size(), width, height);
      return kExitOk;
    }

    if (simulate->parsed()) {
      const std::vector<GrayImage> images = load_fixture_images(root / "images");
      if (images.empty()) fail(ErrorCode::kIoError, "no fixture images under " + (root / "images").string());
      const SimulationContext ctx =
          make_simulation_context(images, seed, load_suite(sim_flags.weights, sim_flags.uniform));
      MultiroundConfig cfg;
      cfg.task = parse_task(sim_task);
      cfg.rounds = rounds;
      cfg.token_pipeline = pipeline != "pixel";
      cfg.pixel_pipeline = pipeline != "token";
      cfg.seed = seed;
      cfg.pixel_quality = quality;
      const std::size_t index = image_index.value_or(seed % images.size());
      if (index >= images.size()) fail(ErrorCode::kInvalidArgument, "no fixture image " + std::to_string(index));
      const MultiroundReport report = run_multiround(cfg, images[index], ctx);
      const std::string csv = report.to_csv();
      if (csv_file.empty()) {
        out << csv;
      } else {
        const std::string_view view(csv);
        write_file(csv_file, ByteView(reinterpret_cast<const std::uint8_t*>(view.data()), view.size()));
      }
      if (table) out << report.to_table();
      return kExitOk;
    }

    if (bench->parsed()) {
      const fs::path wdir = weights_dir.empty() ? root / "weights" : fs::path(weights_dir);
      const fs::path cdir = corpus_dir.empty() ? root / "corpus" : fs::path(corpus_dir);
      const ModelSuite suite = load_suite({(wdir / "w_ar.umew").string(), (wdir / "w_masked.umew").string(),
                                           (wdir / "w_textcond.umew").string()},
                                          false);
      const auto texts = load_token_corpus(cdir / "heldout.text.umtk", Modality::kText);
      const auto images = load_token_corpus(cdir / "heldout.image.umtk", Modality::kImage);
      const BenchReport report = run_bench(texts, images, suite, bench_seed);
      out << report.to_table();
      if (!bench_csv.empty()) {
        const std::string csv = report.to_csv();
        write_file(bench_csv, ByteView(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
      }
      return kExitOk;
    }

    if (inspect->parsed()) {
      const Bytes bytes = read_file(inspect_file);
      const Message m = parse_stream([&] { return read_message(bytes); });
      const ByteView all(bytes);
      char note[256];
      std::snprintf(note, sizeof note, "UMIC v%u task=%s direction=%s frames=%zu", kWireVersion,
                    std::string(task_name(m.header.task)).c_str(),
                    m.header.direction == Direction::kUplink ? "uplink" : "downlink", m.frames.size());
      hex_dump(out, 0, all.subspan(0, kMessageHeaderSize), note);
      std::size_t offset = kMessageHeaderSize;
      for (std::size_t i = 0; i < m.frames.size(); ++i) {
        const PayloadFrame& f = m.frames[i];
        std::snprintf(note, sizeof note, "frame %zu: %s / %s, %u tokens, vocab %u, %zu bytes", i,
                      std::string(payload_kind_name(f.kind)).c_str(),
                      std::string(wire_model_name(f.model)).c_str(), f.token_count, f.vocab_size,
                      f.bytes.size());
        hex_dump(out, offset, all.subspan(offset, kFrameHeaderSize), note);
        offset += kFrameHeaderSize;
        hex_dump(out, offset, all.subspan(offset, f.bytes.size()), "payload");
        offset += f.bytes.size();
      }
      out << "total " << bytes.size() << " bytes\n";
      return kExitOk;
    }
  } catch (const CorruptStream& c) {
    err << "error: corrupt stream: " << c.error.what() << "\n";
    return kExitCorruptStream;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace tokenlink::cli
