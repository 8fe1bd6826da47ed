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

#include "tokenlink/weights.hpp"

#include <random>

#include "tokenlink/error.hpp"

namespace tokenlink {

namespace {

constexpr std::string_view kMagic = "UMEW";
constexpr std::uint8_t kVersion = 1;

std::size_t element_count(const std::vector<std::uint32_t>& dims) {
  std::size_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  return n;
}

std::string dims_to_string(const std::vector<std::uint32_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

}  // namespace

std::string_view model_mode_name(ModelMode mode) {
  switch (mode) {
    case ModelMode::kAutoregressive: return "autoregressive";
    case ModelMode::kMasked: return "masked";
    case ModelMode::kTextConditional: return "text-conditional";
  }
  return "unknown";
}

EntropyModelWeights::Layout EntropyModelWeights::expected_layout(ModelMode mode,
                                                                 const ModelArch& arch,
                                                                 std::uint32_t image_vocab,
                                                                 std::uint32_t text_vocab) {
  const std::uint32_t d = arch.d_model;
  const std::uint32_t ff = 4 * d;
  Layout layout;
  layout.push_back({"embed.image", {image_vocab + (mode == ModelMode::kMasked ? 1u : 0u), d}});
  if (mode == ModelMode::kTextConditional) layout.push_back({"embed.text", {text_vocab, d}});
  layout.push_back({"embed.boi", {1, d}});
  layout.push_back({"embed.position", {arch.max_context, d}});
  for (std::uint32_t l = 0; l < arch.n_layers; ++l) {
    const std::string pre = "layers." + std::to_string(l) + ".";
    layout.push_back({pre + "ln1.gain", {d}});
    layout.push_back({pre + "ln1.bias", {d}});
    for (const char* proj : {"query", "key", "value", "output"}) {
      layout.push_back({pre + "attn." + proj + ".weight", {d, d}});
      layout.push_back({pre + "attn." + proj + ".bias", {d}});
    }
    layout.push_back({pre + "ln2.gain", {d}});
    layout.push_back({pre + "ln2.bias", {d}});
    layout.push_back({pre + "ffn.up.weight", {d, ff}});
    layout.push_back({pre + "ffn.up.bias", {ff}});
    layout.push_back({pre + "ffn.down.weight", {ff, d}});
    layout.push_back({pre + "ffn.down.bias", {d}});
  }
  layout.push_back({"final_ln.gain", {d}});
  layout.push_back({"final_ln.bias", {d}});
  layout.push_back({"head.weight", {d, image_vocab}});
  layout.push_back({"head.bias", {image_vocab}});
  return layout;
}

EntropyModelWeights::EntropyModelWeights(ModelMode mode, std::uint32_t image_vocab,
                                         std::uint32_t text_vocab,
                                         std::vector<std::pair<std::string, Tensor>> tensors)
    : mode_(mode), image_vocab_(image_vocab), text_vocab_(text_vocab) {
  if (image_vocab < 2) fail(ErrorCode::kShapeMismatch, "image vocabulary must be >= 2");
  if (mode == ModelMode::kTextConditional && text_vocab < 1) {
    fail(ErrorCode::kShapeMismatch, "text-conditional model needs a text vocabulary");
  }
  const Layout layout = expected_layout(mode, arch_, image_vocab, text_vocab);
  if (tensors.size() != layout.size()) {
    fail(ErrorCode::kShapeMismatch, "expected " + std::to_string(layout.size()) + " tensors, got " +
                                        std::to_string(tensors.size()));
  }
  // Accept any order; store canonically.
  tensors_.reserve(layout.size());
  for (const auto& [name, dims] : layout) {
    auto it = std::find_if(tensors.begin(), tensors.end(),
                           [&](const auto& entry) { return entry.first == name; });
    if (it == tensors.end()) fail(ErrorCode::kShapeMismatch, "missing tensor " + name);
    if (it->second.dims != dims) {
      fail(ErrorCode::kShapeMismatch, name + " has shape " + dims_to_string(it->second.dims) +
                                          ", expected " + dims_to_string(dims));
    }
    if (it->second.data.size() != element_count(dims)) {
      fail(ErrorCode::kShapeMismatch, name + " data size disagrees with its shape");
    }
    tensors_.push_back(std::move(*it));
  }
}

EntropyModelWeights EntropyModelWeights::random(ModelMode mode, std::uint32_t image_vocab,
                                                std::uint32_t text_vocab, std::uint64_t seed,
                                                double scale) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::string, Tensor>> tensors;
  for (auto& [name, dims] : expected_layout(mode, ModelArch{}, image_vocab, text_vocab)) {
    Tensor t{dims, std::vector<double>(element_count(dims))};
    const bool is_gain = name.ends_with(".gain");
    for (double& v : t.data) {
      // Uniform in [-scale, scale) from the top 53 bits; platform independent.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      v = (is_gain ? 1.0 : 0.0) + scale * (2.0 * u - 1.0);
    }
    tensors.emplace_back(name, std::move(t));
  }
  return EntropyModelWeights(mode, image_vocab, text_vocab, std::move(tensors));
}

const Tensor& EntropyModelWeights::tensor(std::string_view name) const {
  for (const auto& [n, t] : tensors_) {
    if (n == name) return t;
  }
  fail(ErrorCode::kShapeMismatch, "no tensor named " + std::string(name));
}

Tensor& EntropyModelWeights::mutable_tensor(std::string_view name) {
  return const_cast<Tensor&>(std::as_const(*this).tensor(name));
}

Bytes serialize_weights(const EntropyModelWeights& weights) {
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(weights.mode()));
  const ModelArch& arch = weights.arch();
  w.u32(arch.d_model);
  w.u32(arch.n_layers);
  w.u32(arch.n_heads);
  w.u32(arch.max_context);
  w.u32(weights.image_vocab_size());
  w.u32(weights.text_vocab_size());
  w.u32(static_cast<std::uint32_t>(weights.tensors().size()));
  for (const auto& [name, t] : weights.tensors()) {
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.raw(name);
    w.u8(static_cast<std::uint8_t>(t.dims.size()));
    for (std::uint32_t d : t.dims) w.u32(d);
    for (double v : t.data) w.f64(v);
  }
  const std::uint32_t crc = crc32c(w.bytes());
  w.u32(crc);
  return std::move(w).take();
}

EntropyModelWeights parse_weights(ByteView bytes) {
  if (bytes.size() < kMagic.size() + 4) fail(ErrorCode::kTruncated, "weight file too short");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    fail(ErrorCode::kBadMagic, "not a UMEW weight file");
  }
  const ByteView body = bytes.first(bytes.size() - 4);
  ByteReader tail(bytes.last(4));
  const std::uint32_t stored_crc = tail.u32();
  if (crc32c(body) != stored_crc) fail(ErrorCode::kChecksumMismatch, "weight file CRC-32C mismatch");

  ByteReader r(body);
  r.raw(kMagic.size());
  const std::uint8_t version = r.u8();
  if (version != kVersion) {
    fail(ErrorCode::kUnsupportedVersion, "weight file version " + std::to_string(version));
  }
  const std::uint8_t mode_byte = r.u8();
  if (mode_byte > 2) fail(ErrorCode::kUnsupportedVersion, "unknown model mode " + std::to_string(mode_byte));
  const auto mode = static_cast<ModelMode>(mode_byte);
  ModelArch arch;
  arch.d_model = r.u32();
  arch.n_layers = r.u32();
  arch.n_heads = r.u32();
  arch.max_context = r.u32();
  if (arch != ModelArch{}) {
    fail(ErrorCode::kUnsupportedVersion,
         "unsupported architecture d_model=" + std::to_string(arch.d_model) + " layers=" +
             std::to_string(arch.n_layers) + " heads=" + std::to_string(arch.n_heads) +
             " context=" + std::to_string(arch.max_context));
  }
  const std::uint32_t image_vocab = r.u32();
  const std::uint32_t text_vocab = r.u32();
  const std::uint32_t count = r.u32();
  if (count > 1024) fail(ErrorCode::kShapeMismatch, "implausible tensor count");

  std::vector<std::pair<std::string, Tensor>> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t name_len = r.u16();
    const ByteView name_bytes = r.raw(name_len);
    std::string name(name_bytes.begin(), name_bytes.end());
    Tensor t;
    const std::uint8_t rank = r.u8();
    std::size_t n = 1;
    for (std::uint8_t k = 0; k < rank; ++k) {
      t.dims.push_back(r.u32());
      n *= t.dims.back();
      if (n > r.remaining()) fail(ErrorCode::kTruncated, "tensor " + name + " exceeds file size");
    }
    t.data.resize(n);
    for (double& v : t.data) v = r.f64();
    tensors.emplace_back(std::move(name), std::move(t));
  }
  if (!r.at_end()) fail(ErrorCode::kShapeMismatch, "trailing bytes after last tensor");
  return EntropyModelWeights(mode, image_vocab, text_vocab, std::move(tensors));
}

EntropyModelWeights load_weights(const std::filesystem::path& path) {
  return parse_weights(read_file(path));
}

void save_weights(const EntropyModelWeights& weights, const std::filesystem::path& path) {
  write_file(path, serialize_weights(weights));
}

}  // namespace tokenlink
