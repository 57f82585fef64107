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

// Dataset preprocessing: keep/drop filters, reference trimming,
// token-budgeted segmentation, training-pair generation and synthetic
// diarization-error injection.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "diarize/prompts.hpp"
#include "diarize/transcript.hpp"

namespace diarize {

using TokenCounter = std::function<std::size_t(const std::string&)>;

/// Stand-in for a subword tokenizer: ceil(1.3 x whitespace tokens).
/// Plug an exact tokenizer through SegmentationConfig when one is
/// available.
inline std::size_t approximate_token_count(const std::string& s) {
  std::size_t words = 0;
  bool in_word = false;
  for (const char c : s) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return static_cast<std::size_t>(std::ceil(1.3 * static_cast<double>(words)));
}

struct SegmentationConfig {
  std::size_t token_budget = 4096;   // inference-time prompt budget
  std::size_t pair_budget = 8192;    // combined prompt + completion budget
  TokenCounter counter = approximate_token_count;
  SerializationConfig serialization;
};

/// A token-budgeted contiguous slice of a transcript. word_range is
/// half-open into the parent; a parent's segments are contiguous,
/// disjoint, and cover it exactly.
struct Segment {
  std::string parent_id;
  std::size_t index = 0;
  std::pair<std::size_t, std::size_t> word_range;
  std::string text;  // serialized slice
};

struct TrainingPair {
  std::string prompt;
  std::string completion;
  std::string parent_id;
  std::size_t index = 0;
};

struct FilterDecision {
  bool keep = true;
  std::string reason;  // machine-readable drop reason, empty when kept
};

/// Keeps exactly-two-speaker transcripts.
inline FilterDecision filter_speaker_count(const Transcript& t) {
  const std::size_t n = speaker_ids(t).size();
  if (n == 2) return {true, ""};
  if (n < 2) return {false, "single speaker"};
  return {false, "more than two speakers"};
}

/// Flags transcripts where some n-gram (1 <= n <= max_ngram) repeats
/// consecutively more than `threshold` times. Exactly `threshold`
/// repetitions stay clean.
inline FilterDecision detect_repeats(const Transcript& t, std::size_t max_ngram = 5,
                                     std::size_t threshold = 10) {
  const std::vector<std::string> words = word_texts(t);
  for (std::size_t n = 1; n <= max_ngram; ++n) {
    if (words.size() < 2 * n) continue;
    // Consecutive block repeats can start at any alignment offset.
    for (std::size_t offset = 0; offset < n; ++offset) {
      std::size_t run = 1;
      for (std::size_t i = offset + n; i + n <= words.size(); i += n) {
        bool same = true;
        for (std::size_t k = 0; k < n; ++k) {
          if (words[i + k] != words[i - n + k]) { same = false; break; }
        }
        if (!same) { run = 1; continue; }
        if (++run > threshold) {
          std::string gram;
          for (std::size_t k = 0; k < n; ++k) {
            if (k) gram += ' ';
            gram += words[i + k];
          }
          return {false, "repeated sequence '" + gram + "'"};
        }
      }
    }
  }
  return {true, ""};
}

/// Drops ASR words that start after the reference transcript's last
/// end timestamp (strictly after; a word starting exactly at the
/// cutoff is kept). Both sides must carry the needed timestamps.
inline Transcript trim_to_reference(const Transcript& asr, const Transcript& reference) {
  double cutoff = -1.0;
  for (const Word& w : reference.words) {
    if (w.end_time) cutoff = std::max(cutoff, *w.end_time);
  }
  if (cutoff < 0.0) throw std::runtime_error("timestamps required for trimming");
  Transcript out = asr;
  out.words.clear();
  for (const Word& w : asr.words) {
    if (!w.start_time) throw std::runtime_error("timestamps required for trimming");
    if (*w.start_time <= cutoff) out.words.push_back(w);
  }
  return out;
}

namespace detail {

/// Maximal same-speaker runs, in order.
inline std::vector<std::pair<std::size_t, std::size_t>> speaker_turns(const Transcript& t) {
  std::vector<std::pair<std::size_t, std::size_t>> turns;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= t.words.size(); ++i) {
    if (i == t.words.size() || t.words[i].speaker != t.words[begin].speaker) {
      turns.emplace_back(begin, i);
      begin = i;
    }
  }
  return turns;
}

}  // namespace detail

/// Splits a transcript into contiguous segments whose serialized text
/// plus `template_overhead` stays within the token budget. Whole
/// speaker turns are accumulated greedily; a single turn that cannot
/// fit is split at word boundaries, both parts keeping its speaker.
inline std::vector<Segment> segment_transcript(const Transcript& t, const SegmentationConfig& cfg,
                                               std::size_t template_overhead) {
  std::vector<Segment> segments;
  if (t.words.empty()) return segments;
  if (template_overhead >= cfg.token_budget) throw std::runtime_error("token budget unsatisfiable");

  const auto slice_tokens = [&](std::size_t b, std::size_t e) {
    return cfg.counter(serialize(slice(t, b, e), cfg.serialization));
  };
  const auto fits = [&](std::size_t b, std::size_t e) {
    return slice_tokens(b, e) + template_overhead <= cfg.token_budget;
  };
  const auto emit = [&](std::size_t b, std::size_t e) {
    segments.push_back(Segment{t.id, segments.size(), {b, e},
                               serialize(slice(t, b, e), cfg.serialization)});
  };

  const auto turns = detail::speaker_turns(t);
  std::size_t seg_begin = 0;
  std::size_t seg_end = 0;  // words accumulated so far: [seg_begin, seg_end)

  for (std::size_t ti = 0; ti < turns.size(); ++ti) {
    const auto [turn_begin, turn_end] = turns[ti];
    if (fits(seg_begin, turn_end)) {
      seg_end = turn_end;
      continue;
    }
    if (seg_end > seg_begin) {
      emit(seg_begin, seg_end);
      seg_begin = seg_end;
      if (fits(seg_begin, turn_end)) {
        seg_end = turn_end;
        continue;
      }
    }
    // The turn alone is over budget; split it at word boundaries.
    std::size_t b = seg_begin;
    while (!fits(b, turn_end)) {
      // Largest prefix [b, x) that fits; token counts are monotone in x.
      std::size_t lo = b + 1, hi = turn_end - 1, x = 0;
      while (lo <= hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (fits(b, mid)) { x = mid; lo = mid + 1; }
        else { if (mid == b + 1) break; hi = mid - 1; }
      }
      if (x == 0) throw std::runtime_error("token budget unsatisfiable");
      emit(b, x);
      b = x;
    }
    seg_begin = b;
    seg_end = turn_end;
  }
  if (seg_end > seg_begin) emit(seg_begin, seg_end);
  return segments;
}

/// Builds fine-tuning prompt/completion pairs: the ASR slice wrapped in
/// the fine-tuned prompt template, the oracle slice as the completion,
/// segmented on identical word ranges so that the combined token count
/// stays within cfg.pair_budget.
inline std::vector<TrainingPair> build_training_pairs(const Transcript& asr,
                                                      const Transcript& oracle,
                                                      const SegmentationConfig& cfg = {},
                                                      const PromptConfig& prompt_cfg = {}) {
  if (asr.words.size() != oracle.words.size()) {
    throw std::runtime_error("oracle/asr wording mismatch");
  }
  for (std::size_t i = 0; i < asr.words.size(); ++i) {
    if (asr.words[i].text != oracle.words[i].text) {
      throw std::runtime_error("oracle/asr wording mismatch");
    }
  }

  std::vector<TrainingPair> pairs;
  if (asr.words.empty()) return pairs;

  const auto pair_cost = [&](std::size_t b, std::size_t e) {
    const std::string prompt =
        build_prompt(serialize(slice(asr, b, e), cfg.serialization), prompt_cfg);
    const std::string completion = serialize(slice(oracle, b, e), cfg.serialization);
    return cfg.counter(prompt) + cfg.counter(completion);
  };
  const auto fits = [&](std::size_t b, std::size_t e) { return pair_cost(b, e) <= cfg.pair_budget; };
  const auto emit = [&](std::size_t b, std::size_t e) {
    pairs.push_back(TrainingPair{
        build_prompt(serialize(slice(asr, b, e), cfg.serialization), prompt_cfg),
        serialize(slice(oracle, b, e), cfg.serialization), asr.id, pairs.size()});
  };

  const auto turns = detail::speaker_turns(asr);
  std::size_t seg_begin = 0;
  std::size_t seg_end = 0;
  for (std::size_t ti = 0; ti < turns.size(); ++ti) {
    const auto [turn_begin, turn_end] = turns[ti];
    if (fits(seg_begin, turn_end)) {
      seg_end = turn_end;
      continue;
    }
    if (seg_end > seg_begin) {
      emit(seg_begin, seg_end);
      seg_begin = seg_end;
      if (fits(seg_begin, turn_end)) {
        seg_end = turn_end;
        continue;
      }
    }
    std::size_t b = seg_begin;
    while (!fits(b, turn_end)) {
      std::size_t lo = b + 1, hi = turn_end - 1, x = 0;
      while (lo <= hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (fits(b, mid)) { x = mid; lo = mid + 1; }
        else { if (mid == b + 1) break; hi = mid - 1; }
      }
      if (x == 0) throw std::runtime_error("token budget unsatisfiable");
      emit(b, x);
      b = x;
    }
    seg_begin = b;
    seg_end = turn_end;
  }
  if (seg_end > seg_begin) emit(seg_begin, seg_end);
  return pairs;
}

/// Synthetic diarization-error model. Deterministic under `seed`;
/// corrupts only speaker labels, never words.
struct ErrorModel {
  std::uint64_t seed = 0;
  double boundary_shift_rate = 0.0;   // per turn boundary
  std::size_t boundary_shift_span = 1;
  double phrase_flip_rate = 0.0;      // per turn
  std::pair<std::size_t, std::size_t> phrase_len = {1, 3};
};

/// Injects two kinds of label errors into a two-speaker transcript:
/// boundary shifts (trailing words of a turn move to the following
/// speaker) and phrase flips (an interior phrase of a turn flips to
/// the other speaker). Words, word order, and the speaker alphabet
/// are preserved; every turn keeps at least its first word.
inline Transcript inject_errors(const Transcript& t, const ErrorModel& model) {
  const auto ids = speaker_ids(t);
  if (ids.size() != 2) throw std::runtime_error("two speakers required");
  const int id_a = *ids.begin();
  const int id_b = *std::next(ids.begin());

  std::mt19937_64 rng(model.seed);
  std::bernoulli_distribution shift_coin(model.boundary_shift_rate);
  std::bernoulli_distribution flip_coin(model.phrase_flip_rate);

  Transcript out = t;

  // Boundary shifts on the original turn structure.
  const auto turns = detail::speaker_turns(t);
  for (std::size_t k = 0; k + 1 < turns.size(); ++k) {
    if (!shift_coin(rng)) continue;
    const auto [begin, end] = turns[k];
    std::uniform_int_distribution<std::size_t> span_dist(1, std::max<std::size_t>(1, model.boundary_shift_span));
    std::size_t count = span_dist(rng);
    count = std::min(count, end - begin - 1);  // never empty a turn
    const int next_speaker = t.words[turns[k + 1].first].speaker;
    for (std::size_t i = end - count; i < end; ++i) out.words[i].speaker = next_speaker;
  }

  // Phrase flips on the updated turn structure.
  const auto flipped_turns = detail::speaker_turns(out);
  for (const auto& [begin, end] : flipped_turns) {
    if (!flip_coin(rng)) continue;
    const std::size_t len = end - begin;
    if (len < 3) continue;  // interior requires a word on each side
    const std::size_t len_lo = std::max<std::size_t>(1, model.phrase_len.first);
    std::uniform_int_distribution<std::size_t> len_dist(len_lo,
                                                        std::max(len_lo, model.phrase_len.second));
    const std::size_t phrase = std::min(len_dist(rng), len - 2);
    std::uniform_int_distribution<std::size_t> start_dist(begin + 1, end - phrase - 1);
    const std::size_t start = start_dist(rng);
    for (std::size_t i = start; i < start + phrase; ++i) {
      out.words[i].speaker = out.words[i].speaker == id_a ? id_b : id_a;
    }
  }
  return out;
}

}  // namespace diarize
