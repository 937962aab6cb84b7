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

#include "fspell/config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fspell/common.h"

namespace fspell {

namespace {

std::string Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view text) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) Fail("config: bad value '{}' for {}", text, key);
  return value;
}

struct Field {
  std::function<void(Settings&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const Settings&)> get;
};

template <typename Member>
Field Int(Member member) {
  return {[member](Settings& s, std::string_view key, std::string_view v) {
            std::invoke(member, s) = ParseNumber<int>(key, v);
          },
          [member](const Settings& s) { return std::to_string(std::invoke(member, const_cast<Settings&>(s))); }};
}

template <typename Member>
Field U64(Member member) {
  return {[member](Settings& s, std::string_view key, std::string_view v) {
            std::invoke(member, s) = ParseNumber<std::uint64_t>(key, v);
          },
          [member](const Settings& s) { return std::to_string(std::invoke(member, const_cast<Settings&>(s))); }};
}

template <typename Member>
Field Real(Member member) {
  return {[member](Settings& s, std::string_view key, std::string_view v) {
            std::invoke(member, s) = ParseNumber<double>(key, v);
          },
          [member](const Settings& s) { return FormatDouble(std::invoke(member, const_cast<Settings&>(s))); }};
}

Field Letters(std::function<Vocabulary&(Settings&)> member) {
  return {[member](Settings& s, std::string_view, std::string_view v) {
            member(s) = Vocabulary(std::string(v));
          },
          [member](const Settings& s) {
            return member(const_cast<Settings&>(s)).letters();
          }};
}

// Accessors return references into Settings so one table covers get and set.
#define FSPELL_REF(expr) [](Settings& s) -> auto& { return s.expr; }

const std::map<std::string, Field, std::less<>>& Fields() {
  static const auto* fields = new std::map<std::string, Field, std::less<>>{
      {"train.epochs", Int(FSPELL_REF(train.epochs))},
      {"train.lr", Real(FSPELL_REF(train.lr))},
      {"train.adam_beta1", Real(FSPELL_REF(train.adam_beta1))},
      {"train.adam_beta2", Real(FSPELL_REF(train.adam_beta2))},
      {"train.adam_eps", Real(FSPELL_REF(train.adam_eps))},
      {"train.lambda", Real(FSPELL_REF(train.lambda))},
      {"train.grad_clip", Real(FSPELL_REF(train.grad_clip))},
      {"train.seed", U64(FSPELL_REF(train.seed))},
      {"train.checkpoint_every", Int(FSPELL_REF(train.checkpoint_every))},
      {"model.d_model", Int(FSPELL_REF(train.model.d_model))},
      {"model.n_enc_layers", Int(FSPELL_REF(train.model.n_enc_layers))},
      {"model.n_dec_layers", Int(FSPELL_REF(train.model.n_dec_layers))},
      {"model.n_heads", Int(FSPELL_REF(train.model.n_heads))},
      {"model.ffn_dim", Int(FSPELL_REF(train.model.ffn_dim))},
      {"model.max_frames", Int(FSPELL_REF(train.model.max_frames))},
      {"model.max_letters", Int(FSPELL_REF(train.model.max_letters))},
      {"model.dropout", Real(FSPELL_REF(train.model.dropout))},
      {"model.vocab", Letters(FSPELL_REF(train.model.vocab))},
      {"decode.beam_width", Int(FSPELL_REF(decode.beam_width))},
      {"decode.beta", Real(FSPELL_REF(decode.beta))},
      {"decode.gamma", Real(FSPELL_REF(decode.gamma))},
      {"decode.max_decode_len", Int(FSPELL_REF(decode.max_decode_len))},
      {"synth.n_words", Int(FSPELL_REF(synth.n_words))},
      {"synth.word_len_min", Int(FSPELL_REF(synth.word_len_min))},
      {"synth.word_len_max", Int(FSPELL_REF(synth.word_len_max))},
      {"synth.frames_per_letter_min", Int(FSPELL_REF(synth.frames_per_letter_min))},
      {"synth.frames_per_letter_max", Int(FSPELL_REF(synth.frames_per_letter_max))},
      {"synth.transition_frames", Int(FSPELL_REF(synth.transition_frames))},
      {"synth.noise_sigma", Real(FSPELL_REF(synth.noise_sigma))},
      {"synth.n_signers", Int(FSPELL_REF(synth.n_signers))},
      {"synth.left_handed_fraction", Real(FSPELL_REF(synth.left_handed_fraction))},
      {"synth.idle_hand_presence", Real(FSPELL_REF(synth.idle_hand_presence))},
      {"synth.drop_fraction", Real(FSPELL_REF(synth.drop_fraction))},
      {"synth.seed", U64(FSPELL_REF(synth.seed))},
      {"synth.vocab", Letters(FSPELL_REF(synth.vocab))},
  };
  return *fields;
}

#undef FSPELL_REF

}  // namespace

void ApplySetting(Settings& settings, std::string_view key, std::string_view value) {
  auto it = Fields().find(key);
  if (it == Fields().end()) Fail("config: unknown key '{}'", key);
  it->second.set(settings, key, Trim(value));
}

void ApplyConfigText(Settings& settings, std::string_view text, const std::string& origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) Fail("{}:{}: expected 'key = value'", origin, number);
    try {
      ApplySetting(settings, Trim(trimmed.substr(0, eq)), trimmed.substr(eq + 1));
    } catch (const Error& e) {
      Fail("{}:{}: {}", origin, number, e.what());
    }
  }
}

void ApplyConfigFile(Settings& settings, const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail("cannot open config file '{}'", path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  ApplyConfigText(settings, buffer.str(), path);
}

Settings LoadSettings(const std::string& path, const std::vector<std::string>& overrides) {
  Settings settings;
  std::string file = path;
  if (file.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) file = env;
  }
  if (!file.empty()) ApplyConfigFile(settings, file);
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) Fail("override '{}' is not key=value", item);
    ApplySetting(settings, Trim(item.substr(0, eq)), item.substr(eq + 1));
  }
  return settings;
}

std::string DescribeSettings(const Settings& settings) {
  std::string out;
  for (const auto& [key, field] : Fields()) {
    out += fmt::format("{} = {}\n", key, field.get(settings));
  }
  return out;
}

}  // namespace fspell
