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

#ifndef FSPELL_CONFIG_H_
#define FSPELL_CONFIG_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fspell/decode.h"
#include "fspell/synth.h"
#include "fspell/train.h"

namespace fspell {

// Every tunable of the pipeline.
struct Settings {
  TrainConfig train;
  SynthConfig synth;
  DecodeConfig decode;
};

inline constexpr const char* kConfigEnvVar = "FSPELL_CONFIG";

// Sets one dotted key, e.g. "model.d_model" or "decode.beta". Throws
// fspell::Error for unknown keys and unparsable values.
void ApplySetting(Settings& settings, std::string_view key, std::string_view value);

// Config file syntax: one "key = value" per line; '#' starts a comment.
void ApplyConfigText(Settings& settings, std::string_view text,
                     const std::string& origin = "<config>");
void ApplyConfigFile(Settings& settings, const std::string& path);

// Defaults, then the file named by `path` (or by $FSPELL_CONFIG when `path`
// is empty), then `overrides` ("key=value") in order.
Settings LoadSettings(const std::string& path, const std::vector<std::string>& overrides);

// The documented key set with current values, in config-file syntax.
std::string DescribeSettings(const Settings& settings);

}  // namespace fspell

#endif  // FSPELL_CONFIG_H_
