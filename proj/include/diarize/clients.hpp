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

// Completion-endpoint client contract and its implementations: a HTTP
// client for a real endpoint plus the echo / oracle / scripted mocks
// used for testing and dry runs.

#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "diarize/align.hpp"
#include "diarize/io.hpp"
#include "diarize/prompts.hpp"
#include "diarize/transcript.hpp"

namespace diarize {

struct CompletionParams {
  std::size_t max_tokens = 4096;
  double temperature = 0.0;
  std::vector<std::string> stop;  // empty: stop on end-of-text
};

struct ClientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One blocking completion call. Implementations are stateless per
/// call unless noted; retries are the caller's concern.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::string complete(const std::string& prompt, const CompletionParams& params) = 0;
};

/// POSTs {"prompt", "max_tokens", "temperature", "stop"} and expects
/// {"text"} back. Endpoint and bearer token default to the
/// DIARIZE_LLM_URL / DIARIZE_LLM_TOKEN environment variables.
class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(std::string url = {}, std::string token = {})
      : url_(std::move(url)), token_(std::move(token)) {
    if (url_.empty()) {
      if (const char* env = std::getenv("DIARIZE_LLM_URL")) url_ = env;
    }
    if (token_.empty()) {
      if (const char* env = std::getenv("DIARIZE_LLM_TOKEN")) token_ = env;
    }
    if (url_.empty()) throw ClientError("no completion endpoint configured (DIARIZE_LLM_URL)");
    split_url();
  }

  std::string complete(const std::string& prompt, const CompletionParams& params) override {
    nlohmann::json body = {{"prompt", prompt},
                           {"max_tokens", params.max_tokens},
                           {"temperature", params.temperature},
                           {"stop", params.stop}};
    httplib::Client cli(host_);
    cli.set_read_timeout(read_timeout_seconds, 0);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw ClientError("completion request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw ClientError("completion endpoint returned status " + std::to_string(res->status));
    }
    try {
      return nlohmann::json::parse(res->body).at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ClientError(std::string("completion response lacks text field: ") + e.what());
    }
  }

  time_t read_timeout_seconds = 120;

 private:
  void split_url() {
    // httplib takes scheme://host[:port] and the path separately.
    const auto scheme_end = url_.find("://");
    const std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_begin = url_.find('/', host_begin);
    if (path_begin == std::string::npos) {
      host_ = url_;
      path_ = "/";
    } else {
      host_ = url_.substr(0, path_begin);
      path_ = url_.substr(path_begin);
    }
  }

  std::string url_, token_, host_, path_;
};

/// Returns the prompt's transcript block verbatim; correction becomes
/// the identity.
class EchoClient : public CompletionClient {
 public:
  explicit EchoClient(PromptConfig cfg = {}) : cfg_(std::move(cfg)) {}

  std::string complete(const std::string& prompt, const CompletionParams&) override {
    return extract_prompt_transcript(prompt, cfg_);
  }

 private:
  PromptConfig cfg_;
};

/// Answers with the oracle serialization of each segment: the segment's
/// own words carrying the reference transcript's speaker labels.
///
/// Segments of one transcript arrive in order, so the client keeps a
/// cursor into the reference; when the segment's words are exactly the
/// next reference window the labels are copied positionally, otherwise
/// it falls back to alignment-based transfer. Stateful; use one
/// instance per corrected transcript and do not share across threads.
class OracleClient : public CompletionClient {
 public:
  explicit OracleClient(Transcript reference, PromptConfig prompt_cfg = {},
                        SerializationConfig serialization = {})
      : reference_(std::move(reference)),
        prompt_cfg_(std::move(prompt_cfg)),
        serialization_(std::move(serialization)) {}

  std::string complete(const std::string& prompt, const CompletionParams&) override {
    const std::string block = extract_prompt_transcript(prompt, prompt_cfg_);
    const Transcript segment = parse_serialized(block, serialization_);
    if (segment.empty()) throw ClientError("prompt carries no transcript");

    Transcript labeled;
    if (window_matches(segment)) {
      labeled = segment;
      for (std::size_t i = 0; i < labeled.words.size(); ++i) {
        labeled.words[i].speaker = reference_.words[cursor_ + i].speaker;
      }
      cursor_ += labeled.words.size();
    } else {
      labeled = transfer_labels(reference_, word_texts(segment));
    }
    return serialize(labeled, serialization_);
  }

 private:
  bool window_matches(const Transcript& segment) const {
    if (cursor_ + segment.words.size() > reference_.words.size()) return false;
    for (std::size_t i = 0; i < segment.words.size(); ++i) {
      if (reference_.words[cursor_ + i].text != segment.words[i].text) return false;
    }
    return true;
  }

  Transcript reference_;
  PromptConfig prompt_cfg_;
  SerializationConfig serialization_;
  std::size_t cursor_ = 0;
};

/// Replays a fixed list of completions in call order; exhausting the
/// script raises ClientError.
class ScriptedClient : public CompletionClient {
 public:
  explicit ScriptedClient(std::vector<std::string> completions)
      : completions_(std::move(completions)) {}

  /// Loads one completion per file, in lexicographic filename order.
  static ScriptedClient from_directory(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<std::string> completions;
    completions.reserve(files.size());
    for (const auto& f : files) completions.push_back(read_file(f));
    return ScriptedClient(std::move(completions));
  }

  std::string complete(const std::string&, const CompletionParams&) override {
    if (next_ >= completions_.size()) throw ClientError("completion script exhausted");
    return completions_[next_++];
  }

  std::size_t calls() const { return next_; }

 private:
  std::vector<std::string> completions_;
  std::size_t next_ = 0;
};

/// Adapter for ad-hoc client behaviors in tests.
class CallbackClient : public CompletionClient {
 public:
  using Fn = std::function<std::string(const std::string&, const CompletionParams&)>;
  explicit CallbackClient(Fn fn) : fn_(std::move(fn)) {}

  std::string complete(const std::string& prompt, const CompletionParams& params) override {
    return fn_(prompt, params);
  }

 private:
  Fn fn_;
};

}  // namespace diarize
