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

#ifndef FSPELL_CHECKPOINT_H_
#define FSPELL_CHECKPOINT_H_

#include <iosfwd>
#include <string>

#include "fspell/model.h"

namespace fspell {

// Checkpoint container: a plain-text manifest followed by raw data.
//
//   fspell-checkpoint
//   format_version 1
//   config model.d_model 128
//   ...
//   param <name> <rows> <cols> <byte offset>
//   ...
//   data_bytes <n>
//   end
//   <n bytes: little-endian float64 arrays in manifest order, column-major>
//
// Saving a loaded checkpoint reproduces the input byte for byte.
struct Checkpoint {
  ModelConfig config;
  ModelParams params;
};

inline constexpr int kCheckpointVersion = 1;

void SaveCheckpoint(std::ostream& out, const ModelConfig& config,
                    const ModelParams& params);
std::string SerializeCheckpoint(const ModelConfig& config, const ModelParams& params);
void SaveCheckpointFile(const std::string& path, const ModelConfig& config,
                        const ModelParams& params);

// Throws fspell::Error on any manifest or size mismatch.
Checkpoint LoadCheckpoint(std::istream& in);
Checkpoint LoadCheckpointFile(const std::string& path);

}  // namespace fspell

#endif  // FSPELL_CHECKPOINT_H_
