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

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace diarize {

/// One attributed word. `text` is a normalized token (lowercase, no
/// whitespace, no punctuation except interior apostrophes). `speaker`
/// is a positive integer id. Timestamps are in seconds when present.
struct Word {
  std::string text;
  int speaker = 1;
  std::optional<double> start_time;
  std::optional<double> end_time;

  friend bool operator==(const Word&, const Word&) = default;
};

/// Where a transcript came from.
enum class Source { aws, azure, whisperx, gcp, reference, synthetic, corrected };

inline const char* to_string(Source s) {
  switch (s) {
    case Source::aws: return "aws";
    case Source::azure: return "azure";
    case Source::whisperx: return "whisperx";
    case Source::gcp: return "gcp";
    case Source::reference: return "reference";
    case Source::synthetic: return "synthetic";
    case Source::corrected: return "corrected";
  }
  return "?";
}

inline Source source_from_string(std::string_view s) {
  if (s == "aws") return Source::aws;
  if (s == "azure") return Source::azure;
  if (s == "whisperx") return Source::whisperx;
  if (s == "gcp") return Source::gcp;
  if (s == "reference") return Source::reference;
  if (s == "synthetic") return Source::synthetic;
  if (s == "corrected") return Source::corrected;
  throw std::runtime_error("unknown transcript source '" + std::string(s) + "'");
}

/// A speaker-labeled word sequence. Word order is the authoritative
/// temporal order.
struct Transcript {
  std::string id;
  std::vector<Word> words;
  Source source = Source::reference;

  bool empty() const { return words.empty(); }
  std::size_t size() const { return words.size(); }
};

inline std::vector<std::string> word_texts(const Transcript& t) {
  std::vector<std::string> out;
  out.reserve(t.words.size());
  for (const Word& w : t.words) out.push_back(w.text);
  return out;
}

inline std::set<int> speaker_ids(const Transcript& t) {
  std::set<int> ids;
  for (const Word& w : t.words) ids.insert(w.speaker);
  return ids;
}

/// Contiguous slice [begin, end) of a transcript.
inline Transcript slice(const Transcript& t, std::size_t begin, std::size_t end) {
  Transcript out;
  out.id = t.id;
  out.source = t.source;
  out.words.assign(t.words.begin() + static_cast<std::ptrdiff_t>(begin),
                   t.words.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

namespace detail {

inline bool is_ascii_space(std::uint32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v';
}

inline bool is_space_codepoint(std::uint32_t cp) {
  if (is_ascii_space(cp)) return true;
  if (cp == 0x00A0 || cp == 0x1680 || cp == 0x202F || cp == 0x205F || cp == 0x3000) return true;
  if (cp >= 0x2000 && cp <= 0x200A) return true;            // en/em/thin spaces
  if (cp == 0x2028 || cp == 0x2029) return true;            // line/paragraph separator
  return false;
}

/// Apostrophes that survive inside a word ("that's"). U+2019 is the
/// typographic right single quote most ASRs emit.
inline bool is_apostrophe(std::uint32_t cp) { return cp == '\'' || cp == 0x2019; }

inline bool is_ascii_punct(std::uint32_t cp) {
  return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
         (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
}

inline bool is_punct_codepoint(std::uint32_t cp) {
  if (is_ascii_punct(cp)) return true;
  switch (cp) {
    case 0x00A1: case 0x00AB: case 0x00B6: case 0x00B7: case 0x00BB: case 0x00BF:
    case 0x3001: case 0x3002:
      return true;
    default:
      break;
  }
  if (cp >= 0x2010 && cp <= 0x2027) return true;            // dashes, quotes, ellipsis
  if (cp >= 0x2030 && cp <= 0x205E) return true;            // general punctuation
  return false;
}

inline bool is_letter_like(std::uint32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp < 0x80) return false;
  return !is_punct_codepoint(cp) && !is_space_codepoint(cp) && !is_apostrophe(cp);
}

inline std::uint32_t to_lower_codepoint(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;  // Latin-1 uppercase
  return cp;
}

/// Minimal UTF-8 decoder. Invalid bytes decode as themselves so that
/// arbitrary input never throws.
inline std::vector<std::uint32_t> decode_utf8(std::string_view s) {
  std::vector<std::uint32_t> cps;
  cps.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = c;
    std::size_t extra = 0;
    if (c >= 0xF0) { extra = 3; cp = c & 0x07u; }
    else if (c >= 0xE0) { extra = 2; cp = c & 0x0Fu; }
    else if (c >= 0xC0) { extra = 1; cp = c & 0x1Fu; }
    if (extra > 0 && i + extra < s.size()) {
      bool ok = true;
      std::uint32_t acc = cp;
      for (std::size_t k = 1; k <= extra; ++k) {
        const unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) { ok = false; break; }
        acc = (acc << 6) | (cc & 0x3Fu);
      }
      if (ok) {
        cps.push_back(acc);
        i += extra + 1;
        continue;
      }
    }
    cps.push_back(c);  // invalid byte passes through
    ++i;
  }
  return cps;
}

inline void encode_utf8(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace detail

/// Lowercases and strips punctuation from arbitrary text, splitting on
/// whitespace. Apostrophes between two letters survive ("that's"), all
/// other punctuation is removed. Idempotent; empty input yields an
/// empty sequence.
inline std::vector<std::string> normalize_text(std::string_view raw) {
  using namespace detail;
  const std::vector<std::uint32_t> cps = decode_utf8(raw);
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const std::uint32_t cp = cps[i];
    if (is_space_codepoint(cp)) {
      flush();
      continue;
    }
    if (is_apostrophe(cp)) {
      const bool prev_letter = i > 0 && is_letter_like(cps[i - 1]);
      const bool next_letter = i + 1 < cps.size() && is_letter_like(cps[i + 1]);
      if (prev_letter && next_letter) current.push_back('\'');
      continue;
    }
    if (is_punct_codepoint(cp)) continue;
    encode_utf8(to_lower_codepoint(cp), current);
  }
  flush();
  return tokens;
}

/// Rendering of speaker-change tokens. The pattern must contain "{}"
/// exactly once; the default renders id 3 as "<speaker:3>". Rendered
/// tokens must stay distinguishable from normalized words, i.e. the
/// literal part must contain characters that normalization strips.
struct SerializationConfig {
  std::string speaker_token_pattern = "<speaker:{}>";

  std::string token_prefix() const {
    const auto pos = placeholder_pos();
    return speaker_token_pattern.substr(0, pos);
  }
  std::string token_suffix() const {
    const auto pos = placeholder_pos();
    return speaker_token_pattern.substr(pos + 2);
  }

  std::string render_speaker_token(int id) const {
    return token_prefix() + std::to_string(id) + token_suffix();
  }

  void validate() const {
    const std::string rendered = render_speaker_token(1);
    const std::vector<std::string> n = normalize_text(rendered);
    if (n.size() == 1 && n[0] == rendered) {
      throw std::runtime_error(
          "speaker token pattern '" + speaker_token_pattern +
          "' is indistinguishable from a normalized word");
    }
  }

 private:
  std::size_t placeholder_pos() const {
    const auto pos = speaker_token_pattern.find("{}");
    if (pos == std::string::npos) {
      throw std::runtime_error("speaker token pattern lacks '{}' placeholder");
    }
    return pos;
  }
};

/// Serializes a transcript into the text form exchanged with LLMs: a
/// speaker token at the start and at every speaker change, words
/// single-space separated.
///
///   [hi/1, there/1, yes/2]  ->  "<speaker:1> hi there <speaker:2> yes"
inline std::string serialize(const Transcript& t, const SerializationConfig& cfg = {}) {
  if (t.words.empty()) throw std::runtime_error("empty transcript");
  cfg.validate();
  std::string out;
  int prev_speaker = 0;
  bool first = true;
  for (const Word& w : t.words) {
    if (first || w.speaker != prev_speaker) {
      if (!first) out.push_back(' ');
      out += cfg.render_speaker_token(w.speaker);
      prev_speaker = w.speaker;
    }
    out.push_back(' ');
    out += w.text;
    first = false;
  }
  return out;
}

namespace detail {

/// Locates the next speaker token inside `tok` at or after `from`.
/// Returns {begin, end, id} of the match, or begin == npos.
struct TokenMatch {
  std::size_t begin = std::string::npos;
  std::size_t end = 0;
  int id = 0;
};

inline TokenMatch find_speaker_token(std::string_view tok, std::size_t from,
                                     const std::string& prefix, const std::string& suffix) {
  while (from < tok.size()) {
    const std::size_t p = tok.find(prefix, from);
    if (p == std::string_view::npos) return {};
    std::size_t q = p + prefix.size();
    std::size_t digits_begin = q;
    while (q < tok.size() && tok[q] >= '0' && tok[q] <= '9') ++q;
    if (q > digits_begin && q - digits_begin <= 9 &&
        tok.compare(q, suffix.size(), suffix) == 0) {
      const int id = std::stoi(std::string(tok.substr(digits_begin, q - digits_begin)));
      if (id >= 1) return {p, q + suffix.size(), id};
    }
    from = p + 1;
  }
  return {};
}

}  // namespace detail

/// Parses serialized speaker-labeled text back into a transcript.
/// Scans for the first speaker token; anything before it is ignored.
/// Every later non-token word is normalized and labeled with the most
/// recent speaker token. Throws if no speaker token occurs anywhere.
inline Transcript parse_serialized(std::string_view text, const SerializationConfig& cfg = {}) {
  cfg.validate();
  const std::string prefix = cfg.token_prefix();
  const std::string suffix = cfg.token_suffix();

  Transcript out;
  out.source = Source::corrected;
  int current_speaker = 0;

  std::size_t i = 0;
  while (true) {
    // Next whitespace-delimited chunk.
    while (i < text.size() && detail::is_ascii_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !detail::is_ascii_space(static_cast<unsigned char>(text[j]))) ++j;
    const std::string_view chunk = text.substr(i, j - i);
    i = j;

    std::size_t pos = 0;
    while (pos < chunk.size()) {
      const detail::TokenMatch m = detail::find_speaker_token(chunk, pos, prefix, suffix);
      const std::size_t frag_end = (m.begin == std::string_view::npos) ? chunk.size() : m.begin;
      if (current_speaker > 0 && frag_end > pos) {
        for (std::string& w : normalize_text(chunk.substr(pos, frag_end - pos))) {
          out.words.push_back(Word{std::move(w), current_speaker, std::nullopt, std::nullopt});
        }
      }
      if (m.begin == std::string_view::npos) break;
      current_speaker = m.id;
      pos = m.end;
    }
  }

  if (current_speaker == 0) throw std::runtime_error("no speaker labels in text");
  return out;
}

}  // namespace diarize
