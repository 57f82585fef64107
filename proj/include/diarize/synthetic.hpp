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

// Seeded generation of two-speaker conversational transcripts, the
// desk-scale stand-in for a real corpus.

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "diarize/transcript.hpp"

namespace diarize {

struct SyntheticConfig {
  std::size_t min_turns = 6;
  std::size_t max_turns = 18;
  std::size_t min_turn_words = 2;
  std::size_t max_turn_words = 14;
  bool with_timestamps = true;
};

namespace detail {

// Telephone-conversation filler; normalized forms only.
inline constexpr std::array<const char*, 48> kVocabulary = {
    "yeah",    "right",  "so",      "i",     "you",    "know",   "well",   "think",
    "that's",  "like",   "just",    "it's",  "really", "about",  "going",  "what",
    "they",    "were",   "kind",    "of",    "mean",   "time",   "people", "because",
    "didn't",  "don't",  "there",   "when",  "then",   "good",   "work",   "things",
    "something", "much", "years",   "never", "always", "maybe",  "sure",   "okay",
    "actually", "probably", "house", "school", "family", "money", "weekend", "phone"};

}  // namespace detail

/// One random two-speaker transcript with alternating turns.
inline Transcript generate_synthetic_transcript(std::mt19937_64& rng, std::string id,
                                                const SyntheticConfig& cfg = {}) {
  std::uniform_int_distribution<std::size_t> turn_count_dist(cfg.min_turns, cfg.max_turns);
  std::uniform_int_distribution<std::size_t> turn_len_dist(cfg.min_turn_words, cfg.max_turn_words);
  std::uniform_int_distribution<std::size_t> word_dist(0, detail::kVocabulary.size() - 1);

  Transcript t;
  t.id = std::move(id);
  t.source = Source::synthetic;
  const std::size_t turns = turn_count_dist(rng);
  double clock = 0.0;
  for (std::size_t k = 0; k < turns; ++k) {
    const int speaker = static_cast<int>(k % 2) + 1;
    const std::size_t len = turn_len_dist(rng);
    for (std::size_t i = 0; i < len; ++i) {
      Word w;
      w.text = detail::kVocabulary[word_dist(rng)];
      w.speaker = speaker;
      if (cfg.with_timestamps) {
        w.start_time = clock;
        w.end_time = clock + 0.3;
        clock += 0.35;
      }
      t.words.push_back(std::move(w));
    }
    clock += 0.4;  // inter-turn gap
  }
  return t;
}

inline std::vector<Transcript> generate_synthetic_corpus(std::uint64_t seed, std::size_t n,
                                                         const SyntheticConfig& cfg = {}) {
  std::mt19937_64 rng(seed);
  std::vector<Transcript> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "synthetic-%04zu", i);
    out.push_back(generate_synthetic_transcript(rng, id, cfg));
  }
  return out;
}

}  // namespace diarize
