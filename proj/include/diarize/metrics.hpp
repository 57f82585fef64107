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

// Diarization accuracy metrics against a reference transcript:
//
//   WER      edit errors / reference words, interleaved word order
//   cpWER    per-speaker WER minimized over speaker mappings
//   SA-WER   per-speaker WER under the identity speaker mapping
//   deltaCP  cpWER - WER, the extra error attributable to labeling
//   deltaSA  SA-WER - WER
//
// Error counts are kept as exact integers over a common denominator
// (the reference word count), so the deltas are exact differences and
// corpus-level pooling stays lossless.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diarize/align.hpp"
#include "diarize/transcript.hpp"

namespace diarize {

struct MetricsConfig {
  // Word-count-weighted aggregation (total errors / total reference
  // words) is the default; the unweighted mode averages per-speaker
  // WERs instead, for fidelity experiments.
  bool unweighted_mean = false;
  std::size_t max_speakers = 6;
};

inline double wer(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
  if (reference.empty()) throw std::runtime_error("empty reference");
  return static_cast<double>(edit_distance(reference, hypothesis)) /
         static_cast<double>(reference.size());
}

namespace detail {

inline std::map<int, std::vector<std::string>> words_by_speaker(const Transcript& t) {
  std::map<int, std::vector<std::string>> out;
  for (const Word& w : t.words) out[w.speaker].push_back(w.text);
  return out;
}

struct MappingErrors {
  std::size_t errors = 0;
  double unweighted = 0.0;  // mean of per-pair WERs
};

// Accumulates edit errors for a specific pairing of speaker streams.
// A nullptr side stands for an empty pseudo-speaker.
inline MappingErrors score_mapping(
    const std::vector<const std::vector<std::string>*>& ref_streams,
    const std::vector<const std::vector<std::string>*>& hyp_streams) {
  static const std::vector<std::string> kEmpty;
  MappingErrors me;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t k = 0; k < ref_streams.size(); ++k) {
    const auto& r = ref_streams[k] ? *ref_streams[k] : kEmpty;
    const auto& h = hyp_streams[k] ? *hyp_streams[k] : kEmpty;
    const std::size_t e = edit_distance(r, h);
    me.errors += e;
    if (!r.empty()) {
      sum += static_cast<double>(e) / static_cast<double>(r.size());
      ++pairs;
    } else if (!h.empty()) {
      sum += 1.0;  // insertions against an empty reference stream
      ++pairs;
    }
  }
  me.unweighted = pairs > 0 ? sum / static_cast<double>(pairs) : 0.0;
  return me;
}

}  // namespace detail

struct CpWerResult {
  double value = 0.0;
  std::size_t errors = 0;      // meaningful in weighted mode
  std::size_t ref_words = 0;
  // Best injective mapping, hypothesis speaker -> reference speaker;
  // -1 marks an empty pseudo-speaker on the reference side.
  std::vector<std::pair<int, int>> mapping;
};

/// Concatenated minimum-permutation WER. Tries every injective mapping
/// of hypothesis speakers onto reference speakers (padding either side
/// with empty pseudo-speakers when counts differ) and keeps the
/// mapping with the smallest aggregate error.
inline CpWerResult cpwer(const Transcript& reference, const Transcript& hypothesis,
                         const MetricsConfig& cfg = {}) {
  if (reference.empty()) throw std::runtime_error("empty reference");
  const auto ref_groups = detail::words_by_speaker(reference);
  const auto hyp_groups = detail::words_by_speaker(hypothesis);
  if (ref_groups.size() > cfg.max_speakers || hyp_groups.size() > cfg.max_speakers) {
    throw std::runtime_error("permutation search too large");
  }

  std::vector<int> ref_ids, hyp_ids;
  std::vector<const std::vector<std::string>*> ref_streams, hyp_streams;
  for (const auto& [id, ws] : ref_groups) { ref_ids.push_back(id); ref_streams.push_back(&ws); }
  for (const auto& [id, ws] : hyp_groups) { hyp_ids.push_back(id); hyp_streams.push_back(&ws); }

  const std::size_t k = std::max(ref_streams.size(), hyp_streams.size());
  ref_streams.resize(k, nullptr);
  hyp_streams.resize(k, nullptr);

  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);

  CpWerResult best;
  best.ref_words = reference.size();
  bool have_best = false;
  double best_key = 0.0;
  do {
    std::vector<const std::vector<std::string>*> ref_perm(k);
    for (std::size_t i = 0; i < k; ++i) ref_perm[i] = ref_streams[perm[i]];
    const detail::MappingErrors me = detail::score_mapping(ref_perm, hyp_streams);
    const double key = cfg.unweighted_mean
                           ? me.unweighted
                           : static_cast<double>(me.errors);
    if (!have_best || key < best_key) {
      have_best = true;
      best_key = key;
      best.errors = me.errors;
      best.value = cfg.unweighted_mean
                       ? me.unweighted
                       : static_cast<double>(me.errors) / static_cast<double>(best.ref_words);
      best.mapping.clear();
      for (std::size_t i = 0; i < k; ++i) {
        if (i < hyp_ids.size()) {
          best.mapping.emplace_back(hyp_ids[i], perm[i] < ref_ids.size()
                                                    ? ref_ids[perm[i]]
                                                    : -1);
        }
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct SaWerResult {
  double value = 0.0;
  std::size_t errors = 0;
  std::size_t ref_words = 0;
};

/// Speaker-attributed WER: per-speaker WER under the identity speaker
/// mapping. Hypothesis speakers absent from the reference contribute
/// all their words as insertions.
inline SaWerResult sawer(const Transcript& reference, const Transcript& hypothesis,
                         const MetricsConfig& cfg = {}) {
  if (reference.empty()) throw std::runtime_error("empty reference");
  const auto ref_groups = detail::words_by_speaker(reference);
  const auto hyp_groups = detail::words_by_speaker(hypothesis);
  if (ref_groups.size() > cfg.max_speakers || hyp_groups.size() > cfg.max_speakers) {
    throw std::runtime_error("permutation search too large");
  }

  std::vector<const std::vector<std::string>*> ref_streams, hyp_streams;
  std::map<int, std::pair<const std::vector<std::string>*, const std::vector<std::string>*>> by_id;
  for (const auto& [id, ws] : ref_groups) by_id[id].first = &ws;
  for (const auto& [id, ws] : hyp_groups) by_id[id].second = &ws;
  for (const auto& [id, pair] : by_id) {
    ref_streams.push_back(pair.first);
    hyp_streams.push_back(pair.second);
  }
  const detail::MappingErrors me = detail::score_mapping(ref_streams, hyp_streams);

  SaWerResult r;
  r.ref_words = reference.size();
  r.errors = me.errors;
  r.value = cfg.unweighted_mean
                ? me.unweighted
                : static_cast<double>(me.errors) / static_cast<double>(r.ref_words);
  return r;
}

struct MetricsReport {
  double wer = 0.0;
  double cpwer = 0.0;
  double sawer = 0.0;
  double delta_cp = 0.0;
  double delta_sa = 0.0;
  std::size_t ref_word_count = 0;
  // Exact error counts behind the fractions (weighted mode).
  std::size_t wer_errors = 0;
  std::size_t cpwer_errors = 0;
  std::size_t sawer_errors = 0;
  std::vector<std::pair<int, int>> permutation;
};

inline MetricsReport metrics_report(const Transcript& reference, const Transcript& hypothesis,
                                    const MetricsConfig& cfg = {}) {
  if (reference.empty()) throw std::runtime_error("empty reference");
  MetricsReport r;
  r.ref_word_count = reference.size();

  const std::vector<std::string> ref_words = word_texts(reference);
  const std::vector<std::string> hyp_words = word_texts(hypothesis);
  r.wer_errors = edit_distance(ref_words, hyp_words);
  r.wer = static_cast<double>(r.wer_errors) / static_cast<double>(r.ref_word_count);

  const CpWerResult cp = cpwer(reference, hypothesis, cfg);
  const SaWerResult sa = sawer(reference, hypothesis, cfg);
  r.cpwer = cp.value;
  r.sawer = sa.value;
  r.cpwer_errors = cp.errors;
  r.sawer_errors = sa.errors;
  r.permutation = cp.mapping;

  if (cfg.unweighted_mean) {
    r.delta_cp = r.cpwer - r.wer;
    r.delta_sa = r.sawer - r.wer;
  } else {
    // Difference of integer numerators over the common denominator;
    // exact, and free to go negative for pathological interleavings.
    r.delta_cp = (static_cast<double>(cp.errors) - static_cast<double>(r.wer_errors)) /
                 static_cast<double>(r.ref_word_count);
    r.delta_sa = (static_cast<double>(sa.errors) - static_cast<double>(r.wer_errors)) /
                 static_cast<double>(r.ref_word_count);
  }
  return r;
}

/// Renders a fraction as a percentage the way the result tables print
/// them: two decimals, trailing zeros trimmed (0.0093 -> "0.93",
/// 0.025 -> "2.5", 0.2204 -> "22.04", 0.01 -> "1").
inline std::string format_percent(double fraction) {
  const double pct = std::round(fraction * 10000.0) / 100.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", pct);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

/// Percent change against a baseline, rounded half away from zero and
/// rendered with an explicit sign: (0.93 -> 0.5) => "-46%".
inline std::string format_percent_change(double baseline, double value) {
  if (baseline == 0.0) return value == 0.0 ? "+0%" : "n/a";
  const double change = (value - baseline) / baseline * 100.0;
  long long rounded = static_cast<long long>(std::llround(std::abs(change)));
  if (change < 0 && rounded != 0) return "-" + std::to_string(rounded) + "%";
  return "+" + std::to_string(rounded) + "%";
}

}  // namespace diarize
