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

#ifndef FSPELL_VOCABULARY_H_
#define FSPELL_VOCABULARY_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fspell {

// Letter alphabet plus control tokens.
//
// Token ids: letters occupy 0..n-1, then blank (CTC only), BOS, EOS, PAD.
// The decoder predicts over a separate, smaller class space: letters 0..n-1,
// then EOS (n) and PAD (n+1). PAD is never a target and never emitted.
class Vocabulary {
 public:
  // Default alphabet a-z.
  Vocabulary();
  explicit Vocabulary(std::string letters);

  int num_letters() const { return static_cast<int>(letters_.size()); }
  int blank_id() const { return num_letters(); }
  int bos_id() const { return num_letters() + 1; }
  int eos_id() const { return num_letters() + 2; }
  int pad_id() const { return num_letters() + 3; }
  int size() const { return num_letters() + 4; }

  // CTC emission classes: letters + blank.
  int num_emission_classes() const { return num_letters() + 1; }
  // Decoder output classes: letters + EOS + PAD.
  int num_decoder_classes() const { return num_letters() + 2; }
  int eos_class() const { return num_letters(); }
  int pad_class() const { return num_letters() + 1; }

  const std::string& letters() const { return letters_; }
  bool IsLetter(int id) const { return id >= 0 && id < num_letters(); }
  bool Contains(char c) const { return Find(c) >= 0; }

  // Throws fspell::Error when a character is outside the alphabet.
  std::vector<int> Encode(std::string_view word) const;
  // Throws fspell::Error on non-letter ids.
  std::string Decode(std::span<const int> ids) const;

  bool operator==(const Vocabulary& other) const = default;

 private:
  int Find(char c) const;

  std::string letters_;
};

}  // namespace fspell

#endif  // FSPELL_VOCABULARY_H_
