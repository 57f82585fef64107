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

// Corpus-level evaluation and report rendering: pooled metrics across
// transcripts, baseline-vs-system tables with percent-change columns,
// and the synthetic end-to-end experiment.

#pragma once

#include <functional>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diarize/clients.hpp"
#include "diarize/correction.hpp"
#include "diarize/corpus.hpp"
#include "diarize/metrics.hpp"
#include "diarize/synthetic.hpp"
#include "diarize/transcript.hpp"

namespace diarize {

/// One corpus entry: ground truth, the ASR hypothesis, and any
/// precomputed corrected transcripts keyed by system name.
struct EvalItem {
  Transcript reference;
  Transcript hypothesis;
  std::map<std::string, Transcript> corrected;
};

/// Corpus-level metric aggregate. The default pools edit errors and
/// reference word counts across transcripts before dividing; the
/// per-file mean averages per-file fractions instead.
struct PooledMetrics {
  double wer = 0.0;
  double cpwer = 0.0;
  double sawer = 0.0;
  double delta_cp = 0.0;
  double delta_sa = 0.0;
  std::size_t ref_words = 0;
  std::size_t files = 0;
};

inline PooledMetrics pool_metrics(const std::vector<MetricsReport>& reports,
                                  bool per_file_mean = false) {
  PooledMetrics p;
  p.files = reports.size();
  if (reports.empty()) return p;
  if (per_file_mean) {
    for (const MetricsReport& r : reports) {
      p.wer += r.wer;
      p.cpwer += r.cpwer;
      p.sawer += r.sawer;
      p.ref_words += r.ref_word_count;
    }
    const auto n = static_cast<double>(reports.size());
    p.wer /= n;
    p.cpwer /= n;
    p.sawer /= n;
  } else {
    std::size_t wer_errors = 0, cp_errors = 0, sa_errors = 0;
    for (const MetricsReport& r : reports) {
      wer_errors += r.wer_errors;
      cp_errors += r.cpwer_errors;
      sa_errors += r.sawer_errors;
      p.ref_words += r.ref_word_count;
    }
    const auto n = static_cast<double>(p.ref_words);
    p.wer = static_cast<double>(wer_errors) / n;
    p.cpwer = static_cast<double>(cp_errors) / n;
    p.sawer = static_cast<double>(sa_errors) / n;
  }
  p.delta_cp = p.cpwer - p.wer;
  p.delta_sa = p.sawer - p.wer;
  return p;
}

struct EvaluationCell {
  double delta_cp = 0.0;
  double delta_sa = 0.0;
  std::optional<double> wer;
};

struct EvaluationRow {
  std::string system_name;
  std::vector<EvaluationCell> cells;  // aligned with EvaluationTable::group_names
};

struct EvaluationTable {
  std::vector<std::string> group_names;  // e.g. one per ASR
  EvaluationRow baseline;
  std::vector<EvaluationRow> systems;
};

// ---------------------------------------------------------------------------
// Rendering. Baseline cells print plain percent values; system cells
// print "value / signed-percent-change" against the baseline.

inline std::string render_markdown(const EvaluationTable& table) {
  std::string out = "| System |";
  for (const std::string& g : table.group_names) {
    out += " " + g + " deltaCP | " + g + " deltaSA | " + g + " WER |";
  }
  out += "\n|---|";
  for (std::size_t i = 0; i < table.group_names.size(); ++i) out += "---|---|---|";
  out += "\n";

  const auto render_wer = [](const std::optional<double>& w) {
    return w ? format_percent(*w) : std::string("-");
  };
  out += "| " + (table.baseline.system_name.empty() ? std::string("Baseline")
                                                    : table.baseline.system_name) +
         " |";
  for (const EvaluationCell& c : table.baseline.cells) {
    out += " " + format_percent(c.delta_cp) + " | " + format_percent(c.delta_sa) + " | " +
           render_wer(c.wer) + " |";
  }
  out += "\n";
  for (const EvaluationRow& row : table.systems) {
    out += "| " + row.system_name + " |";
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
      const EvaluationCell& c = row.cells[i];
      const EvaluationCell& b = table.baseline.cells[i];
      out += " " + format_percent(c.delta_cp) + " / " +
             format_percent_change(b.delta_cp, c.delta_cp) + " | " + format_percent(c.delta_sa) +
             " / " + format_percent_change(b.delta_sa, c.delta_sa) + " | " + render_wer(c.wer) +
             " |";
    }
    out += "\n";
  }
  return out;
}

inline std::string render_csv(const EvaluationTable& table) {
  std::string out = "system";
  for (const std::string& g : table.group_names) {
    out += "," + g + "_delta_cp," + g + "_delta_cp_change," + g + "_delta_sa," + g +
           "_delta_sa_change," + g + "_wer";
  }
  out += "\n";
  const auto emit_row = [&](const EvaluationRow& row, bool is_baseline) {
    out += row.system_name.empty() && is_baseline ? "Baseline" : row.system_name;
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
      const EvaluationCell& c = row.cells[i];
      const EvaluationCell& b = table.baseline.cells[i];
      out += "," + format_percent(c.delta_cp);
      out += "," + (is_baseline ? std::string() : format_percent_change(b.delta_cp, c.delta_cp));
      out += "," + format_percent(c.delta_sa);
      out += "," + (is_baseline ? std::string() : format_percent_change(b.delta_sa, c.delta_sa));
      out += "," + (c.wer ? format_percent(*c.wer) : std::string());
    }
    out += "\n";
  };
  emit_row(table.baseline, true);
  for (const EvaluationRow& row : table.systems) emit_row(row, false);
  return out;
}

inline nlohmann::json render_json(const EvaluationTable& table) {
  const auto row_json = [&](const EvaluationRow& row, bool is_baseline) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
      const EvaluationCell& c = row.cells[i];
      nlohmann::json jc = {{"group", table.group_names[i]},
                           {"delta_cp", c.delta_cp},
                           {"delta_sa", c.delta_sa}};
      if (c.wer) jc["wer"] = *c.wer;
      if (!is_baseline) {
        const EvaluationCell& b = table.baseline.cells[i];
        jc["delta_cp_change"] = format_percent_change(b.delta_cp, c.delta_cp);
        jc["delta_sa_change"] = format_percent_change(b.delta_sa, c.delta_sa);
      }
      cells.push_back(std::move(jc));
    }
    return nlohmann::json{{"system", row.system_name.empty() && is_baseline ? "Baseline"
                                                                            : row.system_name},
                          {"cells", std::move(cells)}};
  };
  nlohmann::json rows = nlohmann::json::array();
  rows.push_back(row_json(table.baseline, true));
  for (const EvaluationRow& row : table.systems) rows.push_back(row_json(row, false));
  return nlohmann::json{{"groups", table.group_names}, {"rows", std::move(rows)}};
}

// ---------------------------------------------------------------------------
// Evaluation drivers.

/// A named way to produce corrected transcripts at evaluation time.
/// make_client is invoked once per corpus item, which lets the oracle
/// mock bind the item's reference.
struct CorrectionSystem {
  std::string name;
  std::function<std::unique_ptr<CompletionClient>(const EvalItem&)> make_client;
};

struct EvaluationOptions {
  bool per_file_mean = false;
  bool include_wer = true;
  MetricsConfig metrics;
  CorrectionConfig correction;
  int jobs = 1;
};

namespace detail {

template <typename Fn>
inline std::vector<MetricsReport> map_items(std::size_t n, int jobs, Fn&& fn) {
  std::vector<MetricsReport> out(n);
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::future<void>> futures;
  std::size_t next = 0;
  const std::size_t stride = std::max<std::size_t>(1, n / static_cast<std::size_t>(jobs) + 1);
  while (next < n) {
    const std::size_t begin = next;
    const std::size_t end = std::min(n, begin + stride);
    next = end;
    futures.push_back(std::async(std::launch::async, [&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
    }));
  }
  for (auto& f : futures) f.get();
  return out;
}

inline EvaluationCell cell_from(const PooledMetrics& p, bool include_wer) {
  EvaluationCell c;
  c.delta_cp = p.delta_cp;
  c.delta_sa = p.delta_sa;
  if (include_wer) c.wer = p.wer;
  return c;
}

}  // namespace detail

/// Computes baseline and per-system rows over grouped corpora (one
/// group per ASR, typically). Precomputed corrected transcripts are
/// looked up by system name; systems with a make_client run live.
inline EvaluationTable run_evaluation(
    const std::map<std::string, std::vector<EvalItem>>& groups,
    const std::vector<CorrectionSystem>& systems, const EvaluationOptions& options = {}) {
  std::size_t total = 0;
  for (const auto& [name, items] : groups) total += items.size();
  if (total == 0) throw std::runtime_error("empty corpus");

  EvaluationTable table;
  table.baseline.system_name = "Baseline";
  for (const auto& [group_name, items] : groups) {
    table.group_names.push_back(group_name);
    const auto reports = detail::map_items(items.size(), options.jobs, [&](std::size_t i) {
      return metrics_report(items[i].reference, items[i].hypothesis, options.metrics);
    });
    table.baseline.cells.push_back(
        detail::cell_from(pool_metrics(reports, options.per_file_mean), options.include_wer));
  }

  for (const CorrectionSystem& system : systems) {
    EvaluationRow row;
    row.system_name = system.name;
    for (const auto& [group_name, items] : groups) {
      const auto reports = detail::map_items(items.size(), options.jobs, [&](std::size_t i) {
        const EvalItem& item = items[i];
        const auto it = item.corrected.find(system.name);
        if (it != item.corrected.end()) {
          return metrics_report(item.reference, it->second, options.metrics);
        }
        if (!system.make_client) {
          throw std::runtime_error("no corrected transcript for system '" + system.name +
                                   "' and id '" + item.hypothesis.id + "'");
        }
        const auto client = system.make_client(item);
        const CorrectionResult corrected =
            correct_transcript(item.hypothesis, *client, options.correction);
        return metrics_report(item.reference, corrected.corrected, options.metrics);
      });
      row.cells.push_back(
          detail::cell_from(pool_metrics(reports, options.per_file_mean), options.include_wer));
    }
    table.systems.push_back(std::move(row));
  }
  return table;
}

struct SyntheticExperimentConfig {
  std::size_t n = 50;
  std::uint64_t seed = 0;
  ErrorModel errors;
  SyntheticConfig generator;
  EvaluationOptions options;
};

/// Generates a seeded synthetic corpus, corrupts the labels, and
/// evaluates the given correction systems against the uncorrupted
/// references. Fully reproducible under the seed.
inline EvaluationTable run_synthetic_experiment(const SyntheticExperimentConfig& cfg,
                                                const std::vector<CorrectionSystem>& systems) {
  if (cfg.n == 0) throw std::runtime_error("empty corpus");
  const std::vector<Transcript> references =
      generate_synthetic_corpus(cfg.seed, cfg.n, cfg.generator);

  std::vector<EvalItem> items;
  items.reserve(references.size());
  for (std::size_t i = 0; i < references.size(); ++i) {
    ErrorModel per_item = cfg.errors;
    per_item.seed = cfg.errors.seed + i + 1;
    EvalItem item;
    item.reference = references[i];
    item.hypothesis = inject_errors(references[i], per_item);
    items.push_back(std::move(item));
  }
  std::map<std::string, std::vector<EvalItem>> groups;
  groups.emplace("synthetic", std::move(items));
  return run_evaluation(groups, systems, cfg.options);
}

}  // namespace diarize
