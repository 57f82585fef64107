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

// TIES merging of fine-tuned checkpoints over a base checkpoint:
// trim task vectors by magnitude, elect per-element signs, average the
// sign-agreeing values with renormalized weights, add back to base.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace diarize {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;  // row-major

  std::size_t element_count() const {
    std::size_t n = 1;
    for (const std::size_t d : shape) n *= d;
    return n;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// A named checkpoint: every operand of one merge shares the same name
/// set and shapes.
using TensorMap = std::map<std::string, Tensor>;

/// Merge hyperparameters. Empty weights mean the defaults: the
/// 0.34/0.33/0.33 split for three models, equal weights otherwise.
struct MergeConfig {
  std::vector<double> weights;
  double density = 0.8;
};

inline std::vector<double> resolve_weights(const MergeConfig& cfg, std::size_t model_count) {
  if (!cfg.weights.empty()) {
    if (cfg.weights.size() != model_count) {
      throw std::runtime_error("weight count does not match model count");
    }
    return cfg.weights;
  }
  if (model_count == 3) return {0.34, 0.33, 0.33};
  return std::vector<double>(model_count, 1.0 / static_cast<double>(model_count));
}

namespace detail {

inline void check_compatible(const TensorMap& a, const TensorMap& b) {
  for (const auto& [name, t] : a) {
    const auto it = b.find(name);
    if (it == b.end()) throw std::runtime_error("tensor missing: " + name);
    if (it->second.shape != t.shape) throw std::runtime_error("tensor shape mismatch: " + name);
  }
  for (const auto& [name, t] : b) {
    if (a.find(name) == a.end()) throw std::runtime_error("tensor missing: " + name);
  }
}

/// ceil(density * n) with a guard against floating-point drift on
/// exact products.
inline std::size_t keep_count(double density, std::size_t n) {
  if (n == 0) return 0;
  const double raw = density * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

}  // namespace detail

/// Elementwise tuned - base.
inline TensorMap task_vector(const TensorMap& base, const TensorMap& tuned) {
  detail::check_compatible(base, tuned);
  TensorMap out;
  for (const auto& [name, b] : base) {
    const Tensor& t = tuned.at(name);
    Tensor d;
    d.shape = b.shape;
    d.data.resize(b.data.size());
    for (std::size_t i = 0; i < b.data.size(); ++i) d.data[i] = t.data[i] - b.data[i];
    out.emplace(name, std::move(d));
  }
  return out;
}

/// Keeps the ceil(density*n) largest-magnitude entries of each tensor
/// and zeroes the rest. Magnitude ties keep the lower flat index.
inline void trim_in_place(Tensor& t, double density) {
  const std::size_t n = t.data.size();
  const std::size_t k = detail::keep_count(density, n);
  if (k >= n) return;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(t.data[a]) > std::abs(t.data[b]);
  });
  std::vector<float> trimmed(n, 0.0f);
  for (std::size_t i = 0; i < k; ++i) trimmed[order[i]] = t.data[order[i]];
  t.data = std::move(trimmed);
}

inline TensorMap trim(TensorMap tv, double density) {
  for (auto& [name, t] : tv) trim_in_place(t, density);
  return tv;
}

/// The scalar TIES update for one element given the trimmed deltas of
/// every model: elect the sign of the weighted sum, then average the
/// agreeing deltas with weights renormalized over them. All-zero or
/// perfectly cancelling deltas leave the element at its base value.
inline double ties_elementwise(const std::vector<double>& deltas,
                               const std::vector<double>& weights) {
  double weighted_sum = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) weighted_sum += weights[i] * deltas[i];
  const int sign = (weighted_sum > 0.0) - (weighted_sum < 0.0);
  if (sign == 0) return 0.0;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const int ds = (deltas[i] > 0.0) - (deltas[i] < 0.0);
    if (ds == sign) {
      num += weights[i] * deltas[i];
      den += weights[i];
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

/// Merges fine-tuned checkpoints over a base checkpoint, tensor by
/// tensor. Elements untouched by every trimmed task vector keep the
/// base value exactly.
inline TensorMap ties_merge(const TensorMap& base, const std::vector<const TensorMap*>& tuned,
                            const MergeConfig& cfg = {}) {
  if (tuned.empty()) throw std::runtime_error("no models to merge");
  if (cfg.density <= 0.0 || cfg.density > 1.0) throw std::runtime_error("density must be in (0,1]");
  for (const TensorMap* m : tuned) detail::check_compatible(base, *m);
  const std::vector<double> weights = resolve_weights(cfg, tuned.size());

  TensorMap out;
  std::vector<double> deltas(tuned.size());
  for (const auto& [name, b] : base) {
    // Trimmed task vectors for this tensor only; peak memory stays at
    // (model count + 1) tensors.
    std::vector<Tensor> trimmed;
    trimmed.reserve(tuned.size());
    for (const TensorMap* m : tuned) {
      const Tensor& t = m->at(name);
      Tensor d;
      d.shape = b.shape;
      d.data.resize(b.data.size());
      for (std::size_t i = 0; i < b.data.size(); ++i) d.data[i] = t.data[i] - b.data[i];
      trim_in_place(d, cfg.density);
      trimmed.push_back(std::move(d));
    }

    Tensor merged;
    merged.shape = b.shape;
    merged.data.resize(b.data.size());
    for (std::size_t i = 0; i < b.data.size(); ++i) {
      bool any = false;
      for (std::size_t m = 0; m < trimmed.size(); ++m) {
        deltas[m] = static_cast<double>(trimmed[m].data[i]);
        any = any || deltas[m] != 0.0;
      }
      if (!any) {
        merged.data[i] = b.data[i];  // base preserved bit-exactly
        continue;
      }
      merged.data[i] =
          static_cast<float>(static_cast<double>(b.data[i]) + ties_elementwise(deltas, weights));
    }
    out.emplace(name, std::move(merged));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint container: an 8-byte little-endian header length, a UTF-8
// JSON header {name: {"shape": [...], "offset": int, "length": int}},
// then the raw little-endian float32 buffers. Offsets are relative to
// the end of the header; tensors are laid out in name order, which
// makes files byte-deterministic.

inline void save_tensor_map(const std::filesystem::path& path, const TensorMap& tensors) {
  nlohmann::json header = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    if (t.data.size() != t.element_count()) {
      throw std::runtime_error("tensor shape/data mismatch: " + name);
    }
    const std::uint64_t length = t.data.size() * sizeof(float);
    header[name] = {{"shape", t.shape}, {"offset", offset}, {"length", length}};
    offset += length;
  }
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::uint64_t header_len = header_text.size();
  char len_bytes[8];
  for (int i = 0; i < 8; ++i) len_bytes[i] = static_cast<char>((header_len >> (8 * i)) & 0xFF);
  out.write(len_bytes, 8);
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& [name, t] : tensors) {
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline TensorMap load_tensor_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char len_bytes[8];
  if (!in.read(len_bytes, 8)) throw std::runtime_error("corrupt checkpoint: " + path.string());
  std::uint64_t header_len = 0;
  for (int i = 0; i < 8; ++i) {
    header_len |= static_cast<std::uint64_t>(static_cast<unsigned char>(len_bytes[i])) << (8 * i);
  }
  std::string header_text(header_len, '\0');
  if (!in.read(header_text.data(), static_cast<std::streamsize>(header_len))) {
    throw std::runtime_error("corrupt checkpoint: " + path.string());
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("corrupt checkpoint header: " + std::string(e.what()));
  }

  const std::streampos data_begin = in.tellg();
  TensorMap out;
  for (const auto& [name, meta] : header.items()) {
    Tensor t;
    t.shape = meta.at("shape").get<std::vector<std::size_t>>();
    const auto offset = meta.at("offset").get<std::uint64_t>();
    const auto length = meta.at("length").get<std::uint64_t>();
    if (length != t.element_count() * sizeof(float)) {
      throw std::runtime_error("corrupt checkpoint: length mismatch for " + name);
    }
    t.data.resize(t.element_count());
    in.seekg(data_begin + static_cast<std::streamoff>(offset));
    if (!in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(length))) {
      throw std::runtime_error("corrupt checkpoint: truncated data for " + name);
    }
    out.emplace(name, std::move(t));
  }
  return out;
}

}  // namespace diarize
