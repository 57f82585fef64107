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

// Canonical transcript file format, the interchange unit of every CLI
// stage:
//
//   {"id": str, "source": str,
//    "words": [{"text": str, "speaker": int, "start": float?, "end": float?}]}

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "diarize/transcript.hpp"

namespace diarize {

inline nlohmann::json to_canonical_json(const Transcript& t) {
  nlohmann::json words = nlohmann::json::array();
  for (const Word& w : t.words) {
    nlohmann::json jw = {{"text", w.text}, {"speaker", w.speaker}};
    if (w.start_time) jw["start"] = *w.start_time;
    if (w.end_time) jw["end"] = *w.end_time;
    words.push_back(std::move(jw));
  }
  return nlohmann::json{{"id", t.id}, {"source", to_string(t.source)}, {"words", std::move(words)}};
}

inline Transcript from_canonical_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("malformed document: root is not an object");
  Transcript t;
  try {
    t.id = j.at("id").get<std::string>();
    t.source = source_from_string(j.at("source").get<std::string>());
    const auto& words = j.at("words");
    if (!words.is_array()) throw std::runtime_error("malformed document: words is not an array");
    std::size_t i = 0;
    for (const auto& jw : words) {
      Word w;
      w.text = jw.at("text").get<std::string>();
      w.speaker = jw.at("speaker").get<int>();
      if (jw.contains("start")) w.start_time = jw.at("start").get<double>();
      if (jw.contains("end")) w.end_time = jw.at("end").get<double>();
      if (w.text.empty()) {
        throw std::runtime_error("malformed document: words[" + std::to_string(i) + "].text is empty");
      }
      if (w.speaker < 1) {
        throw std::runtime_error("malformed document: words[" + std::to_string(i) +
                                 "].speaker must be a positive integer");
      }
      t.words.push_back(std::move(w));
      ++i;
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed document: ") + e.what());
  }
  return t;
}

inline std::string to_canonical_string(const Transcript& t) {
  return to_canonical_json(t).dump(2) + "\n";
}

inline Transcript from_canonical_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed document: ") + e.what());
  }
  return from_canonical_json(j);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline Transcript load_transcript_file(const std::filesystem::path& path) {
  try {
    return from_canonical_string(read_file(path));
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

inline void save_transcript_file(const std::filesystem::path& path, const Transcript& t) {
  write_file(path, to_canonical_string(t));
}

}  // namespace diarize
