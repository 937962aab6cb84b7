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

#include "fspell/vocabulary.h"

#include <algorithm>

#include "fspell/common.h"

namespace fspell {

Vocabulary::Vocabulary() : Vocabulary("abcdefghijklmnopqrstuvwxyz") {}

Vocabulary::Vocabulary(std::string letters) : letters_(std::move(letters)) {
  if (letters_.empty()) Fail("vocabulary must contain at least one letter");
  std::string sorted = letters_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    Fail("vocabulary letters must be distinct: '{}'", letters_);
  }
}

int Vocabulary::Find(char c) const {
  auto pos = letters_.find(c);
  return pos == std::string::npos ? -1 : static_cast<int>(pos);
}

std::vector<int> Vocabulary::Encode(std::string_view word) const {
  std::vector<int> ids;
  ids.reserve(word.size());
  for (char c : word) {
    int id = Find(c);
    if (id < 0) Fail("character '{}' is not in the vocabulary", c);
    ids.push_back(id);
  }
  return ids;
}

std::string Vocabulary::Decode(std::span<const int> ids) const {
  std::string word;
  word.reserve(ids.size());
  for (int id : ids) {
    if (!IsLetter(id)) Fail("token id {} is not a letter", id);
    word.push_back(letters_[id]);
  }
  return word;
}

}  // namespace fspell
