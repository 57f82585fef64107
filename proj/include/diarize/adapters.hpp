// Copyright 2026 The diarize-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Adapters from vendor-specific ASR output documents (AWS Transcribe,
// Azure Speech-to-Text, WhisperX, GCP Speech) to the canonical
// transcript model. Words are normalized, vendor speaker labels are
// remapped to dense integers 1..K in order of first appearance, and
// timestamps are carried when the vendor supplies them.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diarize/io.hpp"
#include "diarize/transcript.hpp"

namespace diarize {

enum class AsrFormat { aws, azure, whisperx, gcp, canonical };

inline const char* to_string(AsrFormat f) {
  switch (f) {
    case AsrFormat::aws: return "aws";
    case AsrFormat::azure: return "azure";
    case AsrFormat::whisperx: return "whisperx";
    case AsrFormat::gcp: return "gcp";
    case AsrFormat::canonical: return "canonical";
  }
  return "?";
}

inline AsrFormat asr_format_from_string(std::string_view s) {
  if (s == "aws") return AsrFormat::aws;
  if (s == "azure") return AsrFormat::azure;
  if (s == "whisperx") return AsrFormat::whisperx;
  if (s == "gcp") return AsrFormat::gcp;
  if (s == "canonical") return AsrFormat::canonical;
  throw std::runtime_error("unknown ASR format '" + std::string(s) + "'");
}

namespace detail {

[[noreturn]] inline void malformed(const std::string& path, const std::string& why) {
  throw std::runtime_error("malformed document: " + path + " " + why);
}

inline const nlohmann::json& need(const nlohmann::json& j, const char* key,
                                  const std::string& path) {
  if (!j.is_object() || !j.contains(key)) malformed(path + "." + key, "is missing");
  return j.at(key);
}

// Vendors disagree on numeric encodings: AWS uses numeric strings,
// GCP appends an "s" suffix, WhisperX uses plain numbers.
inline double to_seconds(const nlohmann::json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (!s.empty() && s.back() == 's') s.pop_back();
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  malformed(path, "is not a time value");
}

// Raw vendor word before normalization and label remapping.
struct RawWord {
  std::string text;
  std::string speaker;
  std::optional<double> start;
  std::optional<double> end;
};

[[noreturn]] inline void unlabeled(std::size_t index) {
  throw std::runtime_error("unlabeled word at index " + std::to_string(index));
}

inline std::vector<RawWord> parse_aws(const nlohmann::json& j) {
  std::vector<RawWord> raw;
  const auto& items = need(need(j, "results", "$"), "items", "$.results");
  if (!items.is_array()) malformed("$.results.items", "is not an array");
  std::size_t i = 0;
  for (const auto& item : items) {
    const std::string path = "$.results.items[" + std::to_string(i) + "]";
    const std::string type = need(item, "type", path).get<std::string>();
    if (type == "punctuation") { ++i; continue; }
    if (type != "pronunciation") malformed(path + ".type", "has unknown value '" + type + "'");
    RawWord w;
    const auto& alts = need(item, "alternatives", path);
    if (!alts.is_array() || alts.empty()) malformed(path + ".alternatives", "is empty");
    w.text = need(alts.at(0), "content", path + ".alternatives[0]").get<std::string>();
    if (!item.contains("speaker_label")) unlabeled(raw.size());
    w.speaker = item.at("speaker_label").get<std::string>();
    if (item.contains("start_time")) w.start = to_seconds(item.at("start_time"), path + ".start_time");
    if (item.contains("end_time")) w.end = to_seconds(item.at("end_time"), path + ".end_time");
    raw.push_back(std::move(w));
    ++i;
  }
  return raw;
}

inline std::vector<RawWord> parse_azure(const nlohmann::json& j) {
  const auto& phrases = need(j, "recognizedPhrases", "$");
  if (!phrases.is_array()) malformed("$.recognizedPhrases", "is not an array");

  std::vector<std::pair<std::int64_t, const nlohmann::json*>> ordered;
  std::size_t i = 0;
  for (const auto& p : phrases) {
    const std::string path = "$.recognizedPhrases[" + std::to_string(i) + "]";
    const std::int64_t offset = need(p, "offsetInTicks", path).get<std::int64_t>();
    ordered.emplace_back(offset, &p);
    ++i;
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<RawWord> raw;
  for (const auto& [offset, pp] : ordered) {
    const auto& p = *pp;
    const std::string path = "$.recognizedPhrases[offset=" + std::to_string(offset) + "]";
    const auto& nbest = need(p, "nBest", path);
    if (!nbest.is_array() || nbest.empty()) malformed(path + ".nBest", "is empty");
    const auto& words = need(nbest.at(0), "words", path + ".nBest[0]");
    if (!words.is_array()) malformed(path + ".nBest[0].words", "is not an array");
    const bool has_speaker = p.contains("speaker");
    for (const auto& jw : words) {
      if (!has_speaker) unlabeled(raw.size());
      RawWord w;
      w.text = need(jw, "word", path + ".nBest[0].words[]").get<std::string>();
      w.speaker = std::to_string(p.at("speaker").get<int>());
      if (jw.contains("offsetInTicks")) {
        const double ticks = jw.at("offsetInTicks").get<double>();
        w.start = ticks / 1e7;
        if (jw.contains("durationInTicks")) {
          w.end = (ticks + jw.at("durationInTicks").get<double>()) / 1e7;
        }
      }
      raw.push_back(std::move(w));
    }
  }
  return raw;
}

inline std::vector<RawWord> parse_whisperx(const nlohmann::json& j) {
  std::vector<RawWord> raw;
  const auto& segments = need(j, "segments", "$");
  if (!segments.is_array()) malformed("$.segments", "is not an array");
  std::size_t i = 0;
  for (const auto& seg : segments) {
    const std::string path = "$.segments[" + std::to_string(i) + "]";
    const auto& words = need(seg, "words", path);
    if (!words.is_array()) malformed(path + ".words", "is not an array");
    for (const auto& jw : words) {
      RawWord w;
      w.text = need(jw, "word", path + ".words[]").get<std::string>();
      if (jw.contains("speaker")) {
        w.speaker = jw.at("speaker").get<std::string>();
      } else if (seg.contains("speaker")) {
        w.speaker = seg.at("speaker").get<std::string>();  // inherit the segment's speaker
      } else {
        unlabeled(raw.size());
      }
      if (jw.contains("start")) w.start = to_seconds(jw.at("start"), path + ".words[].start");
      if (jw.contains("end")) w.end = to_seconds(jw.at("end"), path + ".words[].end");
      raw.push_back(std::move(w));
    }
    ++i;
  }
  return raw;
}

inline std::vector<RawWord> parse_gcp(const nlohmann::json& j) {
  std::vector<RawWord> raw;
  const auto& results = need(j, "results", "$");
  if (!results.is_array() || results.empty()) malformed("$.results", "is empty");
  // With diarization enabled the final result carries the full
  // speaker-tagged word list.
  const auto& last = results.at(results.size() - 1);
  const std::string path = "$.results[" + std::to_string(results.size() - 1) + "]";
  const auto& alts = need(last, "alternatives", path);
  if (!alts.is_array() || alts.empty()) malformed(path + ".alternatives", "is empty");
  const auto& words = need(alts.at(0), "words", path + ".alternatives[0]");
  if (!words.is_array()) malformed(path + ".alternatives[0].words", "is not an array");
  for (const auto& jw : words) {
    RawWord w;
    w.text = need(jw, "word", path + ".alternatives[0].words[]").get<std::string>();
    if (!jw.contains("speakerTag")) unlabeled(raw.size());
    w.speaker = std::to_string(jw.at("speakerTag").get<int>());
    if (jw.contains("startTime")) w.start = to_seconds(jw.at("startTime"), path + ".words[].startTime");
    if (jw.contains("endTime")) w.end = to_seconds(jw.at("endTime"), path + ".words[].endTime");
    raw.push_back(std::move(w));
  }
  return raw;
}

inline Transcript assemble(std::vector<RawWord> raw, Source source, std::string id) {
  Transcript t;
  t.id = std::move(id);
  t.source = source;
  std::map<std::string, int> speaker_map;
  for (RawWord& rw : raw) {
    auto [it, inserted] = speaker_map.emplace(rw.speaker, static_cast<int>(speaker_map.size()) + 1);
    const int speaker = it->second;
    for (std::string& tok : normalize_text(rw.text)) {
      t.words.push_back(Word{std::move(tok), speaker, rw.start, rw.end});
    }
  }
  return t;
}

}  // namespace detail

/// Parses a vendor output document into a canonical Transcript.
/// `id` overrides any id derivable from the document (callers usually
/// pass the input filename stem).
inline Transcript ingest(AsrFormat format, const std::string& document, std::string id = "") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed document: ") + e.what());
  }

  switch (format) {
    case AsrFormat::aws: {
      if (id.empty() && j.contains("jobName") && j.at("jobName").is_string()) {
        id = j.at("jobName").get<std::string>();
      }
      return detail::assemble(detail::parse_aws(j), Source::aws, std::move(id));
    }
    case AsrFormat::azure:
      return detail::assemble(detail::parse_azure(j), Source::azure, std::move(id));
    case AsrFormat::whisperx:
      return detail::assemble(detail::parse_whisperx(j), Source::whisperx, std::move(id));
    case AsrFormat::gcp:
      return detail::assemble(detail::parse_gcp(j), Source::gcp, std::move(id));
    case AsrFormat::canonical: {
      Transcript t = from_canonical_json(j);
      // Re-run normalization and label densification so quasi-canonical
      // files from other tools end up in the same shape.
      std::vector<detail::RawWord> raw;
      for (const Word& w : t.words) {
        raw.push_back({w.text, std::to_string(w.speaker), w.start_time, w.end_time});
      }
      Transcript out = detail::assemble(std::move(raw), t.source, id.empty() ? t.id : std::move(id));
      return out;
    }
  }
  throw std::runtime_error("unknown ASR format");
}

inline std::size_t count_speakers(const Transcript& t) { return speaker_ids(t).size(); }

}  // namespace diarize
