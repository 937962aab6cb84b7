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

#ifndef FSPELL_SYNTH_H_
#define FSPELL_SYNTH_H_

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "fspell/landmarks.h"
#include "fspell/vocabulary.h"

namespace fspell {

// Synthetic fingerspelling corpus in raw image coordinates, so the whole
// preprocessing path (hand detection included) runs on it.
struct SynthConfig {
  int n_words = 500;
  int word_len_min = 3;
  int word_len_max = 8;
  int frames_per_letter_min = 3;
  int frames_per_letter_max = 5;
  int transition_frames = 2;  // interpolated frames between two letters
  double noise_sigma = 0.01;
  int n_signers = 10;
  double left_handed_fraction = 0.2;
  double idle_hand_presence = 0.5;  // per-frame chance the other hand shows
  double drop_fraction = 0.0;       // per-frame chance the signing hand is lost
  std::uint64_t seed = 7;
  Vocabulary vocab;

  void Validate() const;
};

// Joint offsets from the wrist (joint 0 is always (0, 0)).
using HandShape = std::array<std::pair<double, double>, kNumHandJoints>;

// One canonical shape per letter, plus an idle shape for the other hand.
// Deterministic in `seed`.
struct PoseFont {
  std::vector<HandShape> letters;
  HandShape idle;
};

PoseFont MakePoseFont(const Vocabulary& vocab, std::uint64_t seed);

// Each letter is held for a random number of frames with Gaussian noise and
// joined to the next by `transition_frames` linearly interpolated frames, so
// a word of length L with holds h_i has sum(h_i) + (L - 1) * t frames.
std::vector<LandmarkSequence> GenerateSynthetic(const SynthConfig& config);

}  // namespace fspell

#endif  // FSPELL_SYNTH_H_
