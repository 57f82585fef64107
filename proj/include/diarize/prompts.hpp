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

#include <stdexcept>
#include <string>
#include <string_view>

namespace diarize {

/// Prompt layouts understood by the correction pipeline. Each variant
/// renders byte-exact with the transcript inserted at exactly one
/// placeholder.
enum class PromptVariant { finetuned, zero_shot_instruct, diarization_lm };

inline const char* to_string(PromptVariant v) {
  switch (v) {
    case PromptVariant::finetuned: return "finetuned";
    case PromptVariant::zero_shot_instruct: return "zero-shot";
    case PromptVariant::diarization_lm: return "dlm";
  }
  return "?";
}

inline PromptVariant prompt_variant_from_string(std::string_view s) {
  if (s == "finetuned") return PromptVariant::finetuned;
  if (s == "zero-shot" || s == "zero_shot" || s == "zero-shot-instruct") {
    return PromptVariant::zero_shot_instruct;
  }
  if (s == "dlm" || s == "diarization-lm" || s == "diarization_lm") {
    return PromptVariant::diarization_lm;
  }
  throw std::runtime_error("unknown prompt variant '" + std::string(s) + "'");
}

struct PromptConfig {
  PromptVariant variant = PromptVariant::finetuned;
  // The continuation marker of the diarization_lm variant; the ASCII
  // form is the default, the glyph is configurable.
  std::string arrow = "-->";
};

inline constexpr std::string_view kCorrectionInstruction =
    "In the speaker diarization transcript below, some words are potentially "
    "misplaced. Please correct those words and move them to the right speaker. "
    "Directly show the corrected transcript without explaining what changes "
    "were made or why you made those changes:";

inline constexpr std::string_view kZeroShotPrimer =
    "Here is the corrected transcript with the words moved to the right speaker:";

/// The literal text that precedes the transcript for a variant.
inline std::string prompt_prefix(const PromptConfig& cfg) {
  switch (cfg.variant) {
    case PromptVariant::finetuned:
      return std::string(kCorrectionInstruction) + "\n\n";
    case PromptVariant::zero_shot_instruct:
      return "<s>[INST]\n" + std::string(kCorrectionInstruction) + "\n\n";
    case PromptVariant::diarization_lm:
      return "";
  }
  return "";
}

/// The literal text that follows the transcript for a variant.
inline std::string prompt_suffix(const PromptConfig& cfg) {
  switch (cfg.variant) {
    case PromptVariant::finetuned:
      return "";
    case PromptVariant::zero_shot_instruct:
      return " [/INST]\n\n" + std::string(kZeroShotPrimer);
    case PromptVariant::diarization_lm:
      return " " + cfg.arrow + " ";
  }
  return "";
}

inline std::string build_prompt(std::string_view transcript_text, const PromptConfig& cfg = {}) {
  return prompt_prefix(cfg) + std::string(transcript_text) + prompt_suffix(cfg);
}

/// Recovers the transcript block from a rendered prompt; the inverse
/// of build_prompt for well-formed prompts, and the whole prompt
/// otherwise.
inline std::string extract_prompt_transcript(std::string_view prompt, const PromptConfig& cfg = {}) {
  const std::string prefix = prompt_prefix(cfg);
  const std::string suffix = prompt_suffix(cfg);
  if (prompt.size() >= prefix.size() + suffix.size() &&
      prompt.substr(0, prefix.size()) == prefix &&
      (suffix.empty() || prompt.substr(prompt.size() - suffix.size()) == suffix)) {
    return std::string(prompt.substr(prefix.size(), prompt.size() - prefix.size() - suffix.size()));
  }
  return std::string(prompt);
}

}  // namespace diarize
