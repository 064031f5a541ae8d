// Copyright 2026 The motionood Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "motionood/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "motionood/error.hpp"

namespace motionood {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'M', 'O', 'O', 'D', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kFlagGenerative = 1u;

std::uint64_t fnv1a(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::vector<unsigned char>& bytes() { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

class Reader {
 public:
  Reader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  const unsigned char* take(std::size_t n) {
    if (n > size_ - pos_) throw CheckpointError("checkpoint is truncated");
    const unsigned char* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

void write_config(Writer& w, const ModelConfig& c) {
  w.put<std::uint64_t>(c.gcn.nodes);
  w.put<std::uint64_t>(c.gcn.coeffs);
  w.put<std::uint64_t>(c.gcn.hidden);
  w.put<std::uint64_t>(c.gcn.blocks);
  w.put<double>(c.gcn.dropout);
  w.put<std::uint64_t>(c.with_vae ? 1 : 0);
  w.put<std::uint64_t>(c.vae.latent);
  w.put<std::uint64_t>(c.vae.encoder_blocks);
  w.put<std::uint64_t>(c.vae.decoder_blocks);
  w.put<double>(c.vae.log_var_min);
  w.put<double>(c.vae.log_var_max);
  w.put<std::uint64_t>(c.observed);
  w.put<std::uint64_t>(c.future);
  w.put<double>(c.bn_eps);
  w.put<double>(c.bn_momentum);
}

ModelConfig read_config(Reader& r) {
  ModelConfig c;
  c.gcn.nodes = r.get<std::uint64_t>();
  c.gcn.coeffs = r.get<std::uint64_t>();
  c.gcn.hidden = r.get<std::uint64_t>();
  c.gcn.blocks = r.get<std::uint64_t>();
  c.gcn.dropout = r.get<double>();
  c.with_vae = r.get<std::uint64_t>() != 0;
  c.vae.latent = r.get<std::uint64_t>();
  c.vae.encoder_blocks = r.get<std::uint64_t>();
  c.vae.decoder_blocks = r.get<std::uint64_t>();
  c.vae.log_var_min = r.get<double>();
  c.vae.log_var_max = r.get<double>();
  c.observed = r.get<std::uint64_t>();
  c.future = r.get<std::uint64_t>();
  c.bn_eps = r.get<double>();
  c.bn_momentum = r.get<double>();
  return c;
}

}  // namespace

void save_checkpoint(const HybridModel& model, const std::filesystem::path& path) {
  Writer w;
  w.put_bytes(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(model.has_vae() ? kFlagGenerative : 0u);
  write_config(w, model.config());
  const ParameterSet& params = model.parameters();
  w.put<std::uint64_t>(params.size());
  for (const auto& p : params) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.name.size()));
    w.put_bytes(p.name.data(), p.name.size());
    w.put<std::uint8_t>(static_cast<std::uint8_t>(p.group));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(p.kind));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) w.put<std::uint64_t>(d);
    w.put_bytes(p.value.data(), p.value.size() * sizeof(double));
  }
  w.put<std::uint64_t>(fnv1a(w.bytes().data(), w.bytes().size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

HybridModel load_checkpoint(const std::filesystem::path& path,
                            CheckpointLoadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kMagic) + 8 + 8) {
    throw CheckpointError("checkpoint is truncated");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  const std::size_t body = bytes.size() - 8;
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, 8);

  Reader r(bytes.data(), body);
  r.take(sizeof(kMagic));
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) +
                          " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  if (fnv1a(bytes.data(), body) != stored) {
    throw CheckpointError("checkpoint checksum mismatch (file is corrupt or truncated)");
  }
  const auto flags = r.get<std::uint32_t>();
  ModelConfig config = read_config(r);
  if (config.with_vae != bool(flags & kFlagGenerative)) {
    throw CheckpointError("checkpoint flags disagree with its configuration");
  }
  const bool keep_generative = config.with_vae && !options.prediction_only;

  ParameterSet tensors;
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = r.get<std::uint32_t>();
    const auto* name_ptr = r.take(name_len);
    std::string name(reinterpret_cast<const char*>(name_ptr), name_len);
    const auto group = static_cast<ParamGroup>(r.get<std::uint8_t>());
    const auto kind = static_cast<ParamKind>(r.get<std::uint8_t>());
    const auto rank = r.get<std::uint32_t>();
    Shape shape(rank);
    for (auto& d : shape) d = r.get<std::uint64_t>();
    const std::size_t n = shape_size(shape);
    if (n > r.remaining() / sizeof(double)) {
      throw CheckpointError("checkpoint is truncated");
    }
    std::vector<double> values(n);
    std::memcpy(values.data(), r.take(n * sizeof(double)), n * sizeof(double));
    if (group == ParamGroup::kGenerative && !keep_generative) continue;
    tensors.add(std::move(name), Tensor(std::move(shape), std::move(values)), group,
                kind);
  }
  if (r.remaining() != 0) throw CheckpointError("trailing bytes in checkpoint");

  config.with_vae = keep_generative;
  return HybridModel(config, tensors);
}

}  // namespace motionood
