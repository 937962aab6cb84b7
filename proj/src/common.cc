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

#include "fspell/common.h"

#include <atomic>
#include <charconv>
#include <cmath>
#include <iostream>

namespace fspell {

namespace {
std::atomic<bool> warnings_enabled{true};
}  // namespace

void SetWarningsEnabled(bool enabled) { warnings_enabled = enabled; }
bool WarningsEnabled() { return warnings_enabled; }
void EmitWarning(const std::string& message) {
  std::cerr << "WARNING: " << message << '\n';
}

void AppendDouble(std::string& out, double value) {
  if (!std::isfinite(value)) Fail("cannot serialize non-finite value {}", value);
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                              std::chars_format::general, 17);
  out.append(buffer, result.ptr);
}

std::string FormatDouble(double value) {
  std::string out;
  AppendDouble(out, value);
  return out;
}

}  // namespace fspell
