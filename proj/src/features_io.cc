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

#include "fspell/features_io.h"

#include <istream>
#include <ostream>

#include "json.hpp"

#include "fspell/common.h"

namespace fspell {

using nlohmann::json;

namespace {

void AppendString(std::string& out, const std::string& s) { out += json(s).dump(); }

void AppendOptionalDouble(std::string& out, const std::optional<double>& v) {
  if (v) {
    AppendDouble(out, *v);
  } else {
    out += "null";
  }
}

template <typename Fn>
void ForEachJsonLine(std::istream& in, Fn&& fn) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      Fail("line {}: malformed record: {}", number, e.what());
    } catch (const Error& e) {
      Fail("line {}: {}", number, e.what());
    }
  }
}

}  // namespace

void WriteFeatureFile(std::ostream& out, std::span<const FeatureRecord> records) {
  std::string line;
  for (const FeatureRecord& r : records) {
    line = "{\"source_id\":";
    AppendString(line, r.pose.source_id);
    line += ",\"label\":";
    if (r.label) {
      AppendString(line, *r.label);
    } else {
      line += "null";
    }
    line += ",\"kept_fraction\":";
    AppendDouble(line, r.pose.kept_fraction);
    line += ",\"features\":[";
    const Eigen::MatrixXd& f = r.pose.features;
    for (Eigen::Index t = 0; t < f.rows(); ++t) {
      if (t) line += ',';
      line += '[';
      for (Eigen::Index k = 0; k < f.cols(); ++k) {
        if (k) line += ',';
        AppendDouble(line, f(t, k));
      }
      line += ']';
    }
    line += "]}\n";
    out << line;
  }
}

std::vector<FeatureRecord> ReadFeatureFile(std::istream& in) {
  std::vector<FeatureRecord> records;
  ForEachJsonLine(in, [&records](const json& j) {
    FeatureRecord r;
    r.pose.source_id = j.at("source_id").get<std::string>();
    if (!j.at("label").is_null()) r.label = j.at("label").get<std::string>();
    r.pose.kept_fraction = j.at("kept_fraction").get<double>();
    const json& rows = j.at("features");
    if (!rows.is_array() || rows.empty()) Fail("'features' must be a non-empty array");
    r.pose.features.resize(static_cast<Eigen::Index>(rows.size()), kNumFeatures);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (!rows[t].is_array() || rows[t].size() != kNumFeatures) {
        Fail("frame {}: expected {} features", t, kNumFeatures);
      }
      for (int k = 0; k < kNumFeatures; ++k) {
        r.pose.features(static_cast<Eigen::Index>(t), k) = rows[t][k].get<double>();
      }
    }
    records.push_back(std::move(r));
  });
  return records;
}

void WriteHandReport(std::ostream& out, std::span<const HandReportRow> rows) {
  std::string line;
  for (const HandReportRow& r : rows) {
    line = "{\"video_id\":";
    AppendString(line, r.video_id);
    line += ",\"signer_id\":";
    AppendString(line, r.signer_id);
    line += fmt::format(",\"per_video\":\"{}\",\"voted\":\"{}\",\"used\":\"{}\"",
                        HandSideName(r.per_video), HandSideName(r.voted),
                        HandSideName(r.used));
    line += ",\"kept_fraction\":";
    AppendDouble(line, r.kept_fraction);
    line += "}\n";
    out << line;
  }
}

void WritePredictionFile(std::ostream& out, std::span<const PredictionRecord> records,
                         const Vocabulary& vocab) {
  std::string line;
  for (const PredictionRecord& r : records) {
    line = "{\"source_id\":";
    AppendString(line, r.source_id);
    line += ",\"prediction\":";
    AppendString(line, r.prediction);
    line += ",\"hypotheses\":[";
    for (std::size_t i = 0; i < r.hypotheses.size(); ++i) {
      const Hypothesis& h = r.hypotheses[i];
      if (i) line += ',';
      line += "{\"letters\":";
      AppendString(line, vocab.Decode(h.letters));
      line += ",\"ctc_logp\":";
      AppendDouble(line, h.ctc_logp);
      line += ",\"lm_logp\":";
      AppendOptionalDouble(line, h.lm_logp);
      line += ",\"length_penalty\":";
      AppendOptionalDouble(line, h.length_penalty);
      line += ",\"combined\":";
      AppendOptionalDouble(line, h.combined);
      line += '}';
    }
    line += "]}\n";
    out << line;
  }
}

std::vector<PredictionRecord> ReadPredictionFile(std::istream& in,
                                                 const Vocabulary& vocab) {
  std::vector<PredictionRecord> records;
  auto optional_double = [](const json& v) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  ForEachJsonLine(in, [&](const json& j) {
    PredictionRecord r;
    r.source_id = j.at("source_id").get<std::string>();
    r.prediction = j.at("prediction").get<std::string>();
    for (const json& h : j.at("hypotheses")) {
      Hypothesis hyp;
      hyp.letters = vocab.Encode(h.at("letters").get<std::string>());
      hyp.ctc_logp = h.at("ctc_logp").get<double>();
      hyp.lm_logp = optional_double(h.at("lm_logp"));
      hyp.length_penalty = optional_double(h.at("length_penalty"));
      hyp.combined = optional_double(h.at("combined"));
      r.hypotheses.push_back(std::move(hyp));
    }
    records.push_back(std::move(r));
  });
  return records;
}

}  // namespace fspell
