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

#ifndef FSPELL_COMMON_H_
#define FSPELL_COMMON_H_

#include <stdexcept>
#include <string>
#include <utility>

#include <fmt/core.h>

namespace fspell {

// All recoverable failures in the library are reported with this type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

template <typename... Args>
[[noreturn]] void Fail(fmt::format_string<Args...> format, Args&&... args) {
  throw Error(fmt::format(format, std::forward<Args>(args)...));
}

// Warnings go to stderr so that stdout and output files stay deterministic.
// Tests may silence them.
void SetWarningsEnabled(bool enabled);
bool WarningsEnabled();
void EmitWarning(const std::string& message);

template <typename... Args>
void Warn(fmt::format_string<Args...> format, Args&&... args) {
  if (WarningsEnabled()) {
    EmitWarning(fmt::format(format, std::forward<Args>(args)...));
  }
}

// Appends `value` with 17 significant digits, which round-trips any double.
void AppendDouble(std::string& out, double value);
std::string FormatDouble(double value);

}  // namespace fspell

#endif  // FSPELL_COMMON_H_
