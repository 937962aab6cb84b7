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

#include "fspell/landmarks.h"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "fspell/common.h"

namespace fspell {

using nlohmann::json;

std::string_view HandSideName(HandSide side) {
  return side == HandSide::kLeft ? "left" : "right";
}

namespace {

struct RecordContext {
  int line = 0;
  std::string video_id;
};

[[noreturn]] void RecordError(const RecordContext& ctx, const std::string& what) {
  if (ctx.video_id.empty()) Fail("line {}: {}", ctx.line, what);
  Fail("line {} (video '{}'): {}", ctx.line, ctx.video_id, what);
}

double ReadNumber(const json& value, const RecordContext& ctx,
                  const std::string& where) {
  if (!value.is_number()) RecordError(ctx, where + ": expected a number");
  double v = value.get<double>();
  if (!std::isfinite(v)) RecordError(ctx, where + ": value is not finite");
  return v;
}

std::optional<Hand> ReadHand(const json& value, const RecordContext& ctx,
                             int frame, HandSide side,
                             const ParseOptions& options, bool& warned_z) {
  if (value.is_null()) return std::nullopt;
  const std::string where =
      fmt::format("frame {} {} hand", frame, HandSideName(side));
  if (!value.is_array()) RecordError(ctx, where + ": expected array or null");
  if (value.size() != kNumHandJoints) {
    if (options.partial_hands_as_absent) return std::nullopt;
    RecordError(ctx, fmt::format("{}: schema error, expected {} landmarks, got {}",
                                 where, kNumHandJoints, value.size()));
  }
  Hand hand;
  for (int j = 0; j < kNumHandJoints; ++j) {
    const json& point = value[j];
    const std::string pwhere = fmt::format("{} landmark {}", where, j);
    if (!point.is_array() || (point.size() != 3 && point.size() != 4)) {
      RecordError(ctx, pwhere + ": expected [x,y,conf] or [x,y,z,conf]");
    }
    if (point.size() == 4 && !warned_z) {
      Warn("line {}: z coordinates present and discarded", ctx.line);
      warned_z = true;
    }
    hand[j].x = ReadNumber(point[0], ctx, pwhere);
    hand[j].y = ReadNumber(point[1], ctx, pwhere);
    hand[j].confidence = ReadNumber(point[point.size() - 1], ctx, pwhere);
  }
  return hand;
}

const json& RequireField(const json& record, const char* name,
                         const RecordContext& ctx) {
  auto it = record.find(name);
  if (it == record.end()) RecordError(ctx, fmt::format("missing field '{}'", name));
  return *it;
}

LandmarkSequence ParseRecord(const json& record, RecordContext& ctx,
                             const ParseOptions& options) {
  if (!record.is_object()) RecordError(ctx, "record is not a JSON object");
  LandmarkSequence seq;
  const json& video_id = RequireField(record, "video_id", ctx);
  if (!video_id.is_string()) RecordError(ctx, "'video_id' must be a string");
  seq.video_id = video_id.get<std::string>();
  ctx.video_id = seq.video_id;
  const json& signer_id = RequireField(record, "signer_id", ctx);
  if (!signer_id.is_string()) RecordError(ctx, "'signer_id' must be a string");
  seq.signer_id = signer_id.get<std::string>();
  auto label = record.find("label");
  if (label != record.end() && !label->is_null()) {
    if (!label->is_string()) RecordError(ctx, "'label' must be a string or null");
    seq.label = label->get<std::string>();
  }
  const json& frames = RequireField(record, "frames", ctx);
  if (!frames.is_array()) RecordError(ctx, "'frames' must be an array");
  bool warned_z = false;
  seq.frames.reserve(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const json& frame = frames[t];
    if (!frame.is_object()) {
      RecordError(ctx, fmt::format("frame {} is not an object", t));
    }
    HandFrame hf;
    const int ti = static_cast<int>(t);
    if (auto it = frame.find("left"); it != frame.end()) {
      hf.left = ReadHand(*it, ctx, ti, HandSide::kLeft, options, warned_z);
    }
    if (auto it = frame.find("right"); it != frame.end()) {
      hf.right = ReadHand(*it, ctx, ti, HandSide::kRight, options, warned_z);
    }
    seq.frames.push_back(std::move(hf));
  }
  try {
    ValidateSequence(seq, options.vocabulary);
  } catch (const Error& e) {
    RecordError(ctx, e.what());
  }
  return seq;
}

void AppendHand(std::string& out, const std::optional<Hand>& hand) {
  if (!hand) {
    out += "null";
    return;
  }
  out += '[';
  for (int j = 0; j < kNumHandJoints; ++j) {
    if (j) out += ',';
    const Landmark& p = (*hand)[j];
    out += '[';
    AppendDouble(out, p.x);
    out += ',';
    AppendDouble(out, p.y);
    out += ',';
    AppendDouble(out, p.confidence);
    out += ']';
  }
  out += ']';
}

void AppendJsonString(std::string& out, const std::string& s) {
  out += json(s).dump();
}

}  // namespace

void ValidateSequence(const LandmarkSequence& sequence,
                      const Vocabulary& vocabulary) {
  if (sequence.frames.empty()) Fail("T must be >= 1 (empty frames list)");
  if (sequence.label) {
    for (char c : *sequence.label) {
      if (!vocabulary.Contains(c)) {
        Fail("label '{}' contains non-vocabulary character '{}'",
             *sequence.label, c);
      }
    }
  }
  bool warned_range = false;
  for (std::size_t t = 0; t < sequence.frames.size(); ++t) {
    for (HandSide side : {HandSide::kLeft, HandSide::kRight}) {
      const auto& hand = sequence.frames[t].hand(side);
      if (!hand) continue;
      for (const Landmark& p : *hand) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
          Fail("frame {} {} hand: non-finite coordinate", t, HandSideName(side));
        }
        if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
          Fail("frame {} {} hand: confidence {} outside [0,1]", t,
               HandSideName(side), p.confidence);
        }
        if (!warned_range &&
            (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0)) {
          Warn("video '{}': coordinates outside [0,1] (first at frame {})",
               sequence.video_id, t);
          warned_range = true;
        }
      }
    }
  }
}

std::vector<LandmarkSequence> ParseLandmarkFile(std::istream& in,
                                                const ParseOptions& options) {
  std::vector<LandmarkSequence> sequences;
  std::string line;
  RecordContext ctx;
  while (std::getline(in, line)) {
    ++ctx.line;
    ctx.video_id.clear();
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      RecordError(ctx, fmt::format("malformed record: {}", e.what()));
    }
    sequences.push_back(ParseRecord(record, ctx, options));
  }
  return sequences;
}

std::vector<LandmarkSequence> ParseLandmarkText(std::string_view text,
                                                const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  return ParseLandmarkFile(in, options);
}

void WriteLandmarkFile(std::ostream& out,
                       std::span<const LandmarkSequence> sequences) {
  std::string line;
  for (const LandmarkSequence& seq : sequences) {
    line.clear();
    line += "{\"video_id\":";
    AppendJsonString(line, seq.video_id);
    line += ",\"signer_id\":";
    AppendJsonString(line, seq.signer_id);
    line += ",\"label\":";
    if (seq.label) {
      AppendJsonString(line, *seq.label);
    } else {
      line += "null";
    }
    line += ",\"frames\":[";
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
      if (t) line += ',';
      line += "{\"left\":";
      AppendHand(line, seq.frames[t].left);
      line += ",\"right\":";
      AppendHand(line, seq.frames[t].right);
      line += '}';
    }
    line += "]}\n";
    out << line;
  }
}

std::string WriteLandmarkText(std::span<const LandmarkSequence> sequences) {
  std::ostringstream out;
  WriteLandmarkFile(out, sequences);
  return out.str();
}

MissingPoseHistogram MissingPoseStats(
    std::span<const LandmarkSequence> sequences) {
  MissingPoseHistogram histogram;
  for (const LandmarkSequence& seq : sequences) {
    std::size_t missing = 0;
    for (const HandFrame& frame : seq.frames) missing += frame.empty();
    // Integer arithmetic keeps exact fractions like 1/2 out of the bucket below.
    std::size_t bucket =
        seq.frames.empty() ? 9 : (missing * 10) / seq.frames.size();
    if (bucket > 9) bucket = 9;
    ++histogram.buckets[bucket];
    ++histogram.total;
  }
  return histogram;
}

}  // namespace fspell
