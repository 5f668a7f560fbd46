/*
 * Copyright 2026 The depthcomp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "depthcomp/net_model.hpp"

namespace depthcomp {

using Ticks = std::int64_t;

/// Layers i+1..j as one candidate block, 0 <= i < j <= L.
struct Block {
  int i = 0;
  int j = 0;

  bool operator==(const Block&) const = default;
  auto operator<=>(const Block&) const = default;
};

/// Importance block with edge-activation bits (a at boundary i, b at j).
struct ImportanceKey {
  int i = 0;
  int j = 0;
  int a = 1;
  int b = 1;

  bool operator==(const ImportanceKey&) const = default;
  auto operator<=>(const ImportanceKey&) const = default;
};

/// T[i,j] in milliseconds. Absent entries are infeasible blocks (+inf).
class CostTable {
 public:
  explicit CostTable(int depth);

  int depth() const { return depth_; }
  void set(int i, int j, double ms);
  std::optional<double> at(int i, int j) const;
  std::vector<Block> blocks() const;

 private:
  std::size_t index(int i, int j) const;

  int depth_;
  std::vector<std::optional<double>> ms_;
};

/// Discretized T[i,j] in integer ticks (`scale` ticks per millisecond).
class TickTable {
 public:
  explicit TickTable(int depth, std::int64_t scale = 1);

  int depth() const { return depth_; }
  std::int64_t scale() const { return scale_; }
  void set(int i, int j, Ticks ticks);
  std::optional<Ticks> at(int i, int j) const;

 private:
  std::size_t index(int i, int j) const;

  int depth_;
  std::int64_t scale_;
  std::vector<std::optional<Ticks>> ticks_;
};

/// I[i,j] (base) or I[i,j,a,b] (extended). Absent entries are masked (-inf).
class ImportanceTable {
 public:
  ImportanceTable(int depth, PlanMode mode);

  int depth() const { return depth_; }
  PlanMode mode() const { return mode_; }

  void set(int i, int j, double score);
  void set(int i, int j, int a, int b, double score);
  void erase(int i, int j, int a, int b);
  std::optional<double> at(int i, int j) const;
  std::optional<double> at(int i, int j, int a, int b) const;

  /// All finite entries in (i, j, a, b) order. Base-mode keys carry a = b = 1.
  std::vector<std::pair<ImportanceKey, double>> entries() const;

 private:
  std::size_t index(int i, int j, int a, int b) const;

  int depth_;
  PlanMode mode_;
  std::vector<std::optional<double>> scores_;
};

struct LatencyModelParams {
  double mac_cost = 5e-8;        // ms per multiply-accumulate
  double layer_overhead = 0.05;  // ms per launched layer
};

void validate_latency_params(const LatencyModelParams& params);

/// Blocks that can be merged into one convolution. Singletons are always in.
std::vector<Block> feasible_latency_blocks(const NetworkSpec& net, bool forbid_wide_after_stride = true);

/// Bit that boundary p carries when the network is left untouched: 1 at the
/// input, 0 at the (identity) output, otherwise whether sigma_p is non-identity.
int natural_edge_bit(const NetworkSpec& net, int p);

/// Expands blocks by edge bits and drops the masked combinations.
std::vector<ImportanceKey> feasible_importance_blocks(const NetworkSpec& net, std::span<const Block> blocks);

/// Checks the three interior masking rules for one extended entry. Edge
/// positions 0 and L are left to table content.
bool violates_mask(const NetworkSpec& net, const ImportanceKey& key);

CostTable synthesize_latency(const NetworkSpec& net, std::span<const Block> blocks,
                             const LatencyModelParams& params);

/// Seeded scores in [-1, 1], quantized to multiples of 2^-10. Each entry is a
/// pure function of (seed, key), so generation order does not matter.
ImportanceTable synthesize_importance(const NetworkSpec& net, std::span<const Block> blocks, PlanMode mode,
                                      std::uint64_t seed);

double quantized_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// e -> e - alpha * mean(size_one_drops) on every finite entry.
ImportanceTable normalize_importance(const ImportanceTable& table, double alpha,
                                     std::span<const double> size_one_drops);

/// Finite scores of blocks of size one (j == i + 1).
std::vector<double> size_one_scores(const ImportanceTable& table);

struct Discretized {
  TickTable table;
  Ticks budget;
};

/// Half-away-from-zero rounding of t * scale for every entry and the budget.
Discretized discretize(const CostTable& table, double budget_ms, std::int64_t scale);
Ticks to_ticks(double ms, std::int64_t scale);

// CSV, header `i,j,ms`.
CostTable load_cost_table(const std::filesystem::path& path, int depth);
std::string cost_table_csv(const CostTable& table);

// CSV, header `i,j,a,b,score`; base files may use `i,j,score`.
ImportanceTable load_importance_table(const std::filesystem::path& path, const NetworkSpec& net, PlanMode mode);
ImportanceTable parse_importance_csv(const std::string& text, const NetworkSpec& net, PlanMode mode);
CostTable parse_cost_csv(const std::string& text, int depth);
std::string importance_table_csv(const ImportanceTable& table);

}  // namespace depthcomp
