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

#include <optional>
#include <vector>

#include "depthcomp/cost_model.hpp"
#include "depthcomp/net_model.hpp"

namespace depthcomp {

/// T_opt[k,l] and the argmin split for every 0 <= k <= l <= L.
class LatencyDP {
 public:
  explicit LatencyDP(int depth);

  int depth() const { return depth_; }
  std::optional<Ticks> t_opt(int k, int l) const;
  /// S_opt[k,l], interior cut points in increasing order.
  IndexSet s_opt(int k, int l) const;
  int split(int k, int l) const;

  void set(int k, int l, Ticks ticks, int split);

 private:
  std::size_t index(int k, int l) const;

  int depth_;
  std::vector<std::optional<Ticks>> t_opt_;
  std::vector<int> split_;
};

LatencyDP optimal_latency(const TickTable& T);

/// I_opt[k,l,a,b] with its argmax split, interior bits fixed at 0.
class ExtImportanceDP {
 public:
  explicit ExtImportanceDP(int depth);

  int depth() const { return depth_; }
  std::optional<double> i_opt(int k, int l, int a, int b) const;
  /// B_opt[k,l,a,b], interior importance boundaries in increasing order.
  IndexSet b_opt(int k, int l, int a, int b) const;

  void set(int k, int l, int a, int b, double score, int split);

 private:
  std::size_t index(int k, int l, int a, int b) const;

  int depth_;
  std::vector<std::optional<double>> score_;
  std::vector<int> split_;
};

/// Entries that violate the interior masks are treated as absent.
ExtImportanceDP optimal_importance(const ImportanceTable& I, const NetworkSpec& net);

/// One D[l,t,a] cell. The set chains are implicit: the parent of a feasible
/// cell with k > 0 is (k, t - T_opt[k,l], alpha).
struct DpCell {
  double score = 0.0;
  int k = -1;
  int alpha = 0;
  bool feasible = false;
};

/// Block of the outer recurrence, with the bits chosen at both ends.
struct OuterBlock {
  int k = 0;
  int l = 0;
  int a = 1;
  int b = 1;
};

class SolverState {
 public:
  SolverState(int depth, Ticks budget, int bits);

  int depth() const { return depth_; }
  Ticks budget() const { return budget_; }

  const DpCell& cell(int l, Ticks t, int a = 0) const;
  void seed(int l, Ticks t, double score, int k = 0, int alpha = 0, int a = 0);
  /// D[0,t,a] = 0 for every t >= 1 and every bit.
  void seed_base_case();

  /// One step of the base recurrence at (l, t). Candidates are predecessor
  /// cells that are feasible and whose block has finite importance.
  void relax_base(int l, Ticks t, const LatencyDP& lat, const ImportanceTable& I);
  void relax_extended(int l, Ticks t, int a, const LatencyDP& lat, const ExtImportanceDP& imp);

  /// Outer blocks from boundary 0 to l, in increasing order.
  std::vector<OuterBlock> trace(int l, Ticks t, int a, const LatencyDP& lat) const;

 private:
  std::size_t index(int l, Ticks t, int a) const;

  int depth_;
  Ticks budget_;
  int bits_;
  std::vector<DpCell> cells_;
};

Plan solve_base(const TickTable& T, const ImportanceTable& I, Ticks budget);
Plan solve_extended(const TickTable& T, const ImportanceTable& I, const NetworkSpec& net, Ticks budget);

/// Sum of T over the blocks induced by {k} + cuts + {l}; nullopt if a block is absent.
std::optional<Ticks> merge_latency_of(const TickTable& T, const IndexSet& cuts, int k, int l);

/// Base surrogate: sum of I over the blocks induced by {k} + A + {l}.
std::optional<double> importance_of(const ImportanceTable& I, const IndexSet& A, int k, int l);

/// Extended surrogate over {0} + B + {L}, bit 1 on A, input/output bits at the ends.
std::optional<double> extended_importance_of(const ImportanceTable& I, const IndexSet& A, const IndexSet& B,
                                             int input_bit, int output_bit);

/// Union of S_opt over the blocks induced by A, plus A itself.
IndexSet latency_optimal_cuts(const LatencyDP& lat, const IndexSet& A);

Plan brute_force_base(const TickTable& T, const ImportanceTable& I, Ticks budget);
Plan brute_force_extended(const TickTable& T, const ImportanceTable& I, const NetworkSpec& net, Ticks budget);

inline constexpr int kOracleMaxDepth = 20;

}  // namespace depthcomp
