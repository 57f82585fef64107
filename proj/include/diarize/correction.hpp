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

// Segment-wise diarization correction: prompt construction, completion
// parsing that cannot alter the input wording, and the orchestrator
// that stitches corrected segments back together.

#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "diarize/align.hpp"
#include "diarize/clients.hpp"
#include "diarize/corpus.hpp"
#include "diarize/prompts.hpp"
#include "diarize/transcript.hpp"

namespace diarize {

struct ParserConfig {
  // Minimum fraction of input words that must take their label from an
  // exact-match alignment op before a completion is trusted. Below it
  // the completion is treated as garbage and the input kept unchanged.
  double min_coverage = 0.5;
  SerializationConfig serialization;
};

struct SegmentStatus {
  bool ok = true;
  std::string fallback_reason;  // empty when ok
};

struct ParsedCompletion {
  Transcript corrected;  // words identical to the input segment's
  SegmentStatus status;
};

/// Extracts speaker labels from a model completion and transfers them
/// onto the input segment's words. The output wording always equals
/// the input wording; every failure mode degrades to returning the
/// input unchanged with a fallback reason.
inline ParsedCompletion parse_completion(const Transcript& input_segment,
                                         const std::string& completion,
                                         const ParserConfig& cfg = {}) {
  ParsedCompletion out;
  out.corrected = input_segment;
  if (input_segment.empty()) {
    out.status = {false, "empty input segment"};
    return out;
  }

  Transcript parsed;
  try {
    parsed = parse_serialized(completion, cfg.serialization);
  } catch (const std::exception&) {
    out.status = {false, "no speaker labels"};
    return out;
  }
  if (parsed.empty()) {
    out.status = {false, "no words in completion"};
    return out;
  }

  const std::vector<std::string> input_words = word_texts(input_segment);
  const TransferStats stats = transfer_labels_with_stats(parsed, input_words);
  const double coverage =
      static_cast<double>(stats.matched) / static_cast<double>(input_words.size());
  if (coverage < cfg.min_coverage) {
    out.status = {false, "low label coverage"};
    return out;
  }

  for (std::size_t i = 0; i < out.corrected.words.size(); ++i) {
    out.corrected.words[i].speaker = stats.labels[i];
  }
  out.status = {true, ""};
  return out;
}

struct CorrectionConfig {
  SegmentationConfig segmentation;
  PromptConfig prompt;
  ParserConfig parser;
  // max_tokens 0 means "track the segmentation token budget".
  CompletionParams params{0, 0.0, {}};
  int max_attempts = 3;
};

struct CorrectionResult {
  Transcript corrected;
  std::vector<SegmentStatus> per_segment_status;
};

/// Corrects a transcript segment by segment: serialize, prompt, call
/// the client (with bounded retries), parse the completion, and stitch
/// the results in segment order. Client failures and unusable
/// completions fall back to the segment's original labels; the output
/// word sequence is the input word sequence, always.
inline CorrectionResult correct_transcript(const Transcript& t, CompletionClient& client,
                                           const CorrectionConfig& cfg = {}) {
  CorrectionResult result;
  result.corrected.id = t.id;
  result.corrected.source = Source::corrected;
  if (t.empty()) return result;

  const std::size_t overhead = cfg.segmentation.counter(build_prompt("", cfg.prompt));
  const std::vector<Segment> segments = segment_transcript(t, cfg.segmentation, overhead);

  CompletionParams params = cfg.params;
  if (params.max_tokens == 0) params.max_tokens = cfg.segmentation.token_budget;

  for (const Segment& seg : segments) {
    const Transcript input = slice(t, seg.word_range.first, seg.word_range.second);
    const std::string prompt = build_prompt(seg.text, cfg.prompt);

    std::string completion;
    bool got_completion = false;
    for (int attempt = 0; attempt < std::max(1, cfg.max_attempts); ++attempt) {
      try {
        completion = client.complete(prompt, params);
        got_completion = true;
        break;
      } catch (const std::exception&) {
      }
    }

    ParsedCompletion parsed;
    if (got_completion) {
      parsed = parse_completion(input, completion, cfg.parser);
    } else {
      parsed.corrected = input;
      parsed.status = {false, "client error"};
    }
    for (const Word& w : parsed.corrected.words) result.corrected.words.push_back(w);
    result.per_segment_status.push_back(parsed.status);
  }
  return result;
}

}  // namespace diarize
