// Copyright 2026 The fspell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fspell/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "fspell/common.h"

namespace fspell {

namespace {

constexpr const char* kMagic = "fspell-checkpoint";

std::uint64_t ToLittle(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out = (out << 8) | ((v >> (8 * i)) & 0xff);
    return out;
  }
}

void WriteConfig(std::string& out, const ModelConfig& c) {
  out += fmt::format("config model.input_dim {}\n", c.input_dim);
  out += fmt::format("config model.d_model {}\n", c.d_model);
  out += fmt::format("config model.n_enc_layers {}\n", c.n_enc_layers);
  out += fmt::format("config model.n_dec_layers {}\n", c.n_dec_layers);
  out += fmt::format("config model.n_heads {}\n", c.n_heads);
  out += fmt::format("config model.ffn_dim {}\n", c.ffn_dim);
  out += fmt::format("config model.max_frames {}\n", c.max_frames);
  out += fmt::format("config model.max_letters {}\n", c.max_letters);
  out += fmt::format("config model.dropout {}\n", FormatDouble(c.dropout));
  out += fmt::format("config model.vocab {}\n", c.vocab.letters());
}

int ParseInt(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    Fail("checkpoint: bad integer '{}' for {}", value, key);
  }
}

ModelConfig ParseConfig(const std::map<std::string, std::string>& kv) {
  auto get = [&kv](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) Fail("checkpoint: manifest lacks {}", key);
    return it->second;
  };
  ModelConfig c;
  c.input_dim = ParseInt(get("model.input_dim"), "model.input_dim");
  c.d_model = ParseInt(get("model.d_model"), "model.d_model");
  c.n_enc_layers = ParseInt(get("model.n_enc_layers"), "model.n_enc_layers");
  c.n_dec_layers = ParseInt(get("model.n_dec_layers"), "model.n_dec_layers");
  c.n_heads = ParseInt(get("model.n_heads"), "model.n_heads");
  c.ffn_dim = ParseInt(get("model.ffn_dim"), "model.ffn_dim");
  c.max_frames = ParseInt(get("model.max_frames"), "model.max_frames");
  c.max_letters = ParseInt(get("model.max_letters"), "model.max_letters");
  c.dropout = std::stod(get("model.dropout"));
  c.vocab = Vocabulary(get("model.vocab"));
  c.Validate();
  return c;
}

}  // namespace

std::string SerializeCheckpoint(const ModelConfig& config, const ModelParams& params) {
  ValidateParams(params, config);
  std::string manifest = fmt::format("{}\nformat_version {}\n", kMagic, kCheckpointVersion);
  WriteConfig(manifest, config);
  std::size_t offset = 0;
  params.ForEach([&](const std::string& name, const Eigen::MatrixXd& m) {
    manifest += fmt::format("param {} {} {} {}\n", name, m.rows(), m.cols(), offset);
    offset += static_cast<std::size_t>(m.size()) * sizeof(double);
  });
  manifest += fmt::format("data_bytes {}\nend\n", offset);
  std::string out = std::move(manifest);
  const std::size_t header = out.size();
  out.resize(header + offset);
  char* cursor = out.data() + header;
  params.ForEach([&](const std::string&, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      std::uint64_t bits = ToLittle(std::bit_cast<std::uint64_t>(m.data()[i]));
      std::memcpy(cursor, &bits, sizeof(bits));
      cursor += sizeof(bits);
    }
  });
  return out;
}

void SaveCheckpoint(std::ostream& out, const ModelConfig& config,
                    const ModelParams& params) {
  const std::string bytes = SerializeCheckpoint(config, params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail("checkpoint: write failed");
}

void SaveCheckpointFile(const std::string& path, const ModelConfig& config,
                        const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail("cannot open '{}' for writing", path);
  SaveCheckpoint(out, config, params);
}

Checkpoint LoadCheckpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) Fail("checkpoint: bad magic line");
  if (!std::getline(in, line) ||
      line != fmt::format("format_version {}", kCheckpointVersion)) {
    Fail("checkpoint: unsupported format version line '{}'", line);
  }
  std::map<std::string, std::string> config_kv;
  struct Entry {
    std::string name;
    Eigen::Index rows, cols;
    std::size_t offset;
  };
  std::vector<Entry> entries;
  std::size_t data_bytes = 0;
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "end") {
      ended = true;
      break;
    }
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    if (kind == "config") {
      std::string key, value;
      fields >> key;
      std::getline(fields >> std::ws, value);
      config_kv[key] = value;
    } else if (kind == "param") {
      Entry e;
      if (!(fields >> e.name >> e.rows >> e.cols >> e.offset)) {
        Fail("checkpoint: malformed param line '{}'", line);
      }
      entries.push_back(std::move(e));
    } else if (kind == "data_bytes") {
      if (!(fields >> data_bytes)) Fail("checkpoint: malformed data_bytes line");
    } else {
      Fail("checkpoint: unknown manifest line '{}'", line);
    }
  }
  if (!ended) Fail("checkpoint: manifest not terminated by 'end'");

  Checkpoint ckpt;
  ckpt.config = ParseConfig(config_kv);
  ckpt.params = ZeroParams(ckpt.config);
  std::string data(data_bytes, '\0');
  in.read(data.data(), static_cast<std::streamsize>(data_bytes));
  if (static_cast<std::size_t>(in.gcount()) != data_bytes) {
    Fail("checkpoint: expected {} data bytes, got {}", data_bytes, in.gcount());
  }
  if (in.peek() != std::char_traits<char>::eof()) Fail("checkpoint: trailing bytes");

  std::size_t index = 0;
  std::size_t expected_offset = 0;
  ckpt.params.ForEach([&](const std::string& name, Eigen::MatrixXd& m) {
    if (index >= entries.size()) Fail("checkpoint: missing parameter '{}'", name);
    const Entry& e = entries[index++];
    if (e.name != name || e.rows != m.rows() || e.cols != m.cols() ||
        e.offset != expected_offset) {
      Fail("checkpoint: parameter '{}' {}x{}@{} does not match expected '{}' {}x{}@{}",
           e.name, e.rows, e.cols, e.offset, name, m.rows(), m.cols(), expected_offset);
    }
    const char* cursor = data.data() + e.offset;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, cursor, sizeof(bits));
      m.data()[i] = std::bit_cast<double>(ToLittle(bits));
      cursor += sizeof(bits);
    }
    expected_offset += static_cast<std::size_t>(m.size()) * sizeof(double);
  });
  if (index != entries.size()) Fail("checkpoint: unexpected extra parameters");
  if (expected_offset != data_bytes) Fail("checkpoint: data size mismatch");
  ValidateParams(ckpt.params, ckpt.config);
  return ckpt;
}

Checkpoint LoadCheckpointFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail("cannot open checkpoint '{}'", path);
  return LoadCheckpoint(in);
}

}  // namespace fspell
