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

#include "fspell/synth.h"

#include <algorithm>
#include <random>

#include "fspell/common.h"
#include "fspell/length_code.h"

namespace fspell {

namespace {

constexpr double kShapeExtent = 0.25;
constexpr double kMinPositiveExtent = 0.12;

HandShape RandomShape(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> offset(-kShapeExtent, kShapeExtent);
  HandShape shape;
  while (true) {
    shape[0] = {0.0, 0.0};
    double max_x = 0.0, max_y = 0.0;
    for (int j = 1; j < kNumHandJoints; ++j) {
      shape[j] = {offset(rng), offset(rng)};
      max_x = std::max(max_x, shape[j].first);
      max_y = std::max(max_y, shape[j].second);
    }
    // Keep the wrist-relative bounding box well away from zero so per-axis
    // scaling stays well conditioned, whichever hand renders it.
    double min_x = 0.0;
    for (const auto& p : shape) min_x = std::min(min_x, p.first);
    if (max_x >= kMinPositiveExtent && max_y >= kMinPositiveExtent &&
        -min_x >= kMinPositiveExtent) {
      return shape;
    }
  }
}

struct Placement {
  double wrist_x, wrist_y, scale;
  bool mirrored;
};

Hand Render(const HandShape& shape, const Placement& place, double sigma,
            std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> confidence(0.8, 1.0);
  Hand hand;
  for (int j = 0; j < kNumHandJoints; ++j) {
    const double dx = place.mirrored ? -shape[j].first : shape[j].first;
    const double dy = shape[j].second;
    hand[j].x = place.wrist_x + place.scale * dx;
    hand[j].y = place.wrist_y + place.scale * dy;
    if (sigma > 0.0) {
      hand[j].x += sigma * noise(rng);
      hand[j].y += sigma * noise(rng);
    }
    hand[j].confidence = confidence(rng);
  }
  return hand;
}

HandShape Blend(const HandShape& a, const HandShape& b, double w) {
  HandShape out;
  for (int j = 0; j < kNumHandJoints; ++j) {
    out[j] = {(1.0 - w) * a[j].first + w * b[j].first,
              (1.0 - w) * a[j].second + w * b[j].second};
  }
  return out;
}

}  // namespace

void SynthConfig::Validate() const {
  if (n_words < 1) Fail("synth: n_words must be >= 1");
  if (word_len_min < 1 || word_len_max > kMaxWordLength || word_len_min > word_len_max) {
    Fail("synth: word length range [{}, {}] must be ordered within [1, {}]",
         word_len_min, word_len_max, kMaxWordLength);
  }
  if (frames_per_letter_min < 1 || frames_per_letter_min > frames_per_letter_max) {
    Fail("synth: frames_per_letter range [{}, {}] must be ordered and >= 1",
         frames_per_letter_min, frames_per_letter_max);
  }
  if (transition_frames < 0) Fail("synth: transition_frames must be >= 0");
  if (!(noise_sigma >= 0.0)) Fail("synth: noise_sigma must be >= 0");
  if (n_signers < 1) Fail("synth: n_signers must be >= 1");
  for (double p : {left_handed_fraction, idle_hand_presence, drop_fraction}) {
    if (!(p >= 0.0 && p <= 1.0)) Fail("synth: probabilities must lie in [0,1]");
  }
  if (drop_fraction >= 1.0) Fail("synth: drop_fraction must be < 1");
}

PoseFont MakePoseFont(const Vocabulary& vocab, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  PoseFont font;
  font.letters.reserve(vocab.num_letters());
  for (int i = 0; i < vocab.num_letters(); ++i) font.letters.push_back(RandomShape(rng));
  font.idle = RandomShape(rng);
  return font;
}

std::vector<LandmarkSequence> GenerateSynthetic(const SynthConfig& config) {
  config.Validate();
  const PoseFont font = MakePoseFont(config.vocab, config.seed);
  std::mt19937_64 rng(config.seed);

  std::vector<bool> left_handed(config.n_signers);
  std::bernoulli_distribution is_left(config.left_handed_fraction);
  for (int s = 0; s < config.n_signers; ++s) left_handed[s] = is_left(rng);

  std::uniform_int_distribution<int> word_len(config.word_len_min, config.word_len_max);
  std::uniform_int_distribution<int> letter(0, config.vocab.num_letters() - 1);
  std::uniform_int_distribution<int> hold(config.frames_per_letter_min,
                                          config.frames_per_letter_max);
  std::uniform_int_distribution<int> signer(0, config.n_signers - 1);
  std::uniform_real_distribution<double> jitter(-0.04, 0.04);
  std::uniform_real_distribution<double> scale(0.8, 1.2);
  std::bernoulli_distribution idle_present(config.idle_hand_presence);
  std::bernoulli_distribution dropped(config.drop_fraction);

  std::vector<LandmarkSequence> corpus;
  corpus.reserve(config.n_words);
  for (int w = 0; w < config.n_words; ++w) {
    LandmarkSequence seq;
    const int s = signer(rng);
    seq.video_id = fmt::format("synth-{:06d}", w);
    seq.signer_id = fmt::format("signer-{:02d}", s);
    const int length = word_len(rng);
    std::vector<int> ids(length);
    for (int& id : ids) id = letter(rng);
    seq.label = config.vocab.Decode(ids);

    const bool left = left_handed[s];
    // The signing hand sits on its own side of the image, the idle hand on
    // the other, lower down.
    Placement active{(left ? 0.6 : 0.4) + jitter(rng), 0.45 + jitter(rng), scale(rng), left};
    Placement idle{(left ? 0.3 : 0.7) + jitter(rng), 0.6 + jitter(rng),
                   0.5 * scale(rng), !left};

    std::vector<HandShape> frames;
    for (int i = 0; i < length; ++i) {
      const HandShape& shape = font.letters[ids[i]];
      const int h = hold(rng);
      for (int k = 0; k < h; ++k) frames.push_back(shape);
      if (i + 1 < length) {
        const HandShape& next = font.letters[ids[i + 1]];
        for (int k = 1; k <= config.transition_frames; ++k) {
          frames.push_back(
              Blend(shape, next, static_cast<double>(k) / (config.transition_frames + 1)));
        }
      }
    }
    seq.frames.reserve(frames.size());
    for (const HandShape& shape : frames) {
      HandFrame frame;
      Hand active_hand = Render(shape, active, config.noise_sigma, rng);
      if (!dropped(rng)) {
        (left ? frame.left : frame.right) = active_hand;
      }
      if (idle_present(rng)) {
        Hand idle_hand = Render(font.idle, idle, config.noise_sigma, rng);
        (left ? frame.right : frame.left) = idle_hand;
      }
      seq.frames.push_back(std::move(frame));
    }
    // The first frame always shows the signing hand so normalization has
    // something to work with.
    if (!seq.frames.front().hand(left ? HandSide::kLeft : HandSide::kRight)) {
      (left ? seq.frames.front().left : seq.frames.front().right) =
          Render(frames.front(), active, config.noise_sigma, rng);
    }
    corpus.push_back(std::move(seq));
  }
  return corpus;
}

}  // namespace fspell
