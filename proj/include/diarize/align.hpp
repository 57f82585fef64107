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

// Transcript-preserving speaker transfer: align two word sequences by
// edit distance and move speaker labels from a source transcript onto a
// target word sequence without changing the target's words.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "diarize/transcript.hpp"

namespace diarize {

enum class AlignOp : std::uint8_t { match, substitute, insert, del };

struct AlignStep {
  AlignOp op;
  std::optional<std::size_t> src_index;  // set for match/substitute/del
  std::optional<std::size_t> tgt_index;  // set for match/substitute/insert

  friend bool operator==(const AlignStep&, const AlignStep&) = default;
};

struct AlignmentPath {
  std::vector<AlignStep> steps;
  std::size_t cost = 0;
};

/// Minimum-edit-distance alignment under unit costs (match 0,
/// substitute/insert/delete 1). The backtrace tie-break is fixed:
/// prefer match/substitute, then delete, then insert, which makes the
/// result a pure function of its inputs. Scoring keeps two rolling
/// rows; the per-cell op choice is kept for the backtrace.
inline AlignmentPath align_words(std::span<const std::string> src,
                                 std::span<const std::string> tgt) {
  const std::size_t n = src.size();
  const std::size_t m = tgt.size();

  // ops[i * (m+1) + j]: how cell (i, j) was reached.
  enum : std::uint8_t { kDiag, kDel, kIns, kStart };
  std::vector<std::uint8_t> ops((n + 1) * (m + 1), kStart);
  std::vector<std::size_t> prev(m + 1), cur(m + 1);

  for (std::size_t j = 0; j <= m; ++j) {
    prev[j] = j;
    if (j > 0) ops[j] = kIns;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    ops[i * (m + 1)] = kDel;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = prev[j - 1] + (src[i - 1] == tgt[j - 1] ? 0 : 1);
      const std::size_t del = prev[j] + 1;
      const std::size_t ins = cur[j - 1] + 1;
      std::size_t best = diag;
      std::uint8_t op = kDiag;
      if (del < best) { best = del; op = kDel; }
      if (ins < best) { best = ins; op = kIns; }
      cur[j] = best;
      ops[i * (m + 1) + j] = op;
    }
    std::swap(prev, cur);
  }

  AlignmentPath path;
  path.cost = prev[m];
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    switch (ops[i * (m + 1) + j]) {
      case kDiag: {
        const bool eq = src[i - 1] == tgt[j - 1];
        path.steps.push_back({eq ? AlignOp::match : AlignOp::substitute, i - 1, j - 1});
        --i; --j;
        break;
      }
      case kDel:
        path.steps.push_back({AlignOp::del, i - 1, std::nullopt});
        --i;
        break;
      default:
        path.steps.push_back({AlignOp::insert, std::nullopt, j - 1});
        --j;
        break;
    }
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

/// Edit distance only, O(min(n,m)) space.
inline std::size_t edit_distance(std::span<const std::string> a,
                                 std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t m = b.size();
  std::vector<std::size_t> row(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({sub, row[j] + 1, row[j - 1] + 1});
    }
  }
  return row[m];
}

struct TransferStats {
  std::vector<int> labels;      // one per target word
  std::size_t matched = 0;      // target words labeled through a match op
  std::size_t aligned = 0;      // target words labeled through match or substitute
};

/// Computes the transferred label for every target word. Words aligned
/// by match/substitute take the aligned source word's speaker; inserted
/// words inherit the nearest preceding label, else the nearest
/// following, else speaker 1.
inline TransferStats transfer_labels_with_stats(const Transcript& src,
                                                std::span<const std::string> tgt_words) {
  TransferStats stats;
  stats.labels.assign(tgt_words.size(), 0);
  if (tgt_words.empty()) return stats;

  const std::vector<std::string> src_texts = word_texts(src);
  const AlignmentPath path = align_words(src_texts, tgt_words);
  for (const AlignStep& s : path.steps) {
    if (s.op == AlignOp::match || s.op == AlignOp::substitute) {
      stats.labels[*s.tgt_index] = src.words[*s.src_index].speaker;
      ++stats.aligned;
      if (s.op == AlignOp::match) ++stats.matched;
    }
  }
  int last = 0;
  for (std::size_t i = 0; i < stats.labels.size(); ++i) {
    if (stats.labels[i] != 0) last = stats.labels[i];
    else if (last != 0) stats.labels[i] = last;
  }
  int next = 0;
  for (std::size_t i = stats.labels.size(); i-- > 0;) {
    if (stats.labels[i] != 0) next = stats.labels[i];
    else stats.labels[i] = (next != 0) ? next : 1;
  }
  return stats;
}

/// Returns a transcript whose words are exactly `tgt_words` and whose
/// speaker labels are transferred from `src`. An empty target yields an
/// empty transcript.
inline Transcript transfer_labels(const Transcript& src, std::vector<std::string> tgt_words) {
  const TransferStats stats = transfer_labels_with_stats(src, tgt_words);
  Transcript out;
  out.id = src.id;
  out.source = src.source;
  out.words.reserve(tgt_words.size());
  for (std::size_t i = 0; i < tgt_words.size(); ++i) {
    out.words.push_back(Word{std::move(tgt_words[i]), stats.labels[i], std::nullopt, std::nullopt});
  }
  return out;
}

/// Builds the oracle transcript: the ASR transcript's exact words
/// (timestamps included) carrying the reference transcript's speaker
/// labels.
inline Transcript make_oracle(const Transcript& reference, const Transcript& asr) {
  if (reference.empty() || asr.empty()) throw std::runtime_error("empty transcript");
  const std::vector<std::string> asr_texts = word_texts(asr);
  const TransferStats stats = transfer_labels_with_stats(reference, asr_texts);
  Transcript oracle = asr;
  oracle.source = Source::synthetic;
  for (std::size_t i = 0; i < oracle.words.size(); ++i) {
    oracle.words[i].speaker = stats.labels[i];
  }
  return oracle;
}

}  // namespace diarize
