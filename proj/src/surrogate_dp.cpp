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


#include <algorithm>
#include <string>

#include "depthcomp/dp.hpp"
#include "depthcomp/error.hpp"

namespace depthcomp {

namespace {

// Dense D tables beyond this many cells are refused rather than allocated.
constexpr std::size_t kMaxCells = std::size_t{1} << 27;

std::string pair_name(int k, int l) { return "(" + std::to_string(k) + "," + std::to_string(l) + ")"; }

void check_budget(const LatencyDP& lat, Ticks budget) {
  const Ticks floor = *lat.t_opt(0, lat.depth());
  if (budget <= floor) {
    throw Error(Errc::InfeasibleBudget, "budget " + std::to_string(budget) + " ticks <= T_opt[0," +
                                            std::to_string(lat.depth()) + "] = " + std::to_string(floor) +
                                            " ticks");
  }
}

void finish_plan(Plan& plan, const TickTable& T, Ticks budget, Ticks latency, double score) {
  plan.predicted_latency_ticks = latency;
  plan.predicted_latency_ms = static_cast<double>(latency) / static_cast<double>(T.scale());
  plan.predicted_importance = score;
  plan.budget_ticks = budget;
  plan.budget_ms = static_cast<double>(budget) / static_cast<double>(T.scale());
  plan.scale = T.scale();
}

}  // namespace

// ---- ExtImportanceDP -------------------------------------------------------

ExtImportanceDP::ExtImportanceDP(int depth) : depth_(depth) {
  const auto n = static_cast<std::size_t>(depth + 1) * static_cast<std::size_t>(depth + 1) * 4;
  score_.resize(n);
  split_.assign(n, -1);
}

std::size_t ExtImportanceDP::index(int k, int l, int a, int b) const {
  if (k < 0 || l <= k || l > depth_ || (a != 0 && a != 1) || (b != 0 && b != 1)) {
    throw Error(Errc::IndexOutOfRange, "I_opt" + pair_name(k, l));
  }
  const std::size_t cell =
      static_cast<std::size_t>(k) * static_cast<std::size_t>(depth_ + 1) + static_cast<std::size_t>(l);
  return cell * 4 + static_cast<std::size_t>(a * 2 + b);
}

std::optional<double> ExtImportanceDP::i_opt(int k, int l, int a, int b) const { return score_[index(k, l, a, b)]; }

void ExtImportanceDP::set(int k, int l, int a, int b, double score, int split) {
  score_[index(k, l, a, b)] = score;
  split_[index(k, l, a, b)] = split;
}

IndexSet ExtImportanceDP::b_opt(int k, int l, int a, int b) const {
  IndexSet cuts;
  int end = l;
  int right = b;
  while (true) {
    const int m = split_[index(k, end, a, right)];
    if (m < k) throw Error(Errc::InvalidArgument, "I_opt" + pair_name(k, end) + " is masked");
    if (m == k) break;
    cuts.push_back(m);
    end = m;
    right = 0;
  }
  std::reverse(cuts.begin(), cuts.end());
  return cuts;
}

ExtImportanceDP optimal_importance(const ImportanceTable& I, const NetworkSpec& net) {
  if (I.mode() != PlanMode::extended) throw Error(Errc::InvalidArgument, "optimal_importance needs an extended table");
  if (I.depth() != net.depth()) throw Error(Errc::InvalidArgument, "importance table depth differs from network");
  const int L = I.depth();
  auto entry = [&](int k, int l, int a, int b) -> std::optional<double> {
    if (violates_mask(net, {k, l, a, b})) return std::nullopt;
    return I.at(k, l, a, b);
  };
  ExtImportanceDP dp(L);
  for (int k = 0; k < L; ++k) {
    for (int l = k + 1; l <= L; ++l) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          std::optional<double> best = entry(k, l, a, b);
          int best_m = best ? k : -1;
          for (int m = k + 1; m < l; ++m) {
            const auto head = dp.i_opt(k, m, a, 0);
            const auto tail = entry(m, l, 0, b);
            if (!head || !tail) continue;
            const double cand = *head + *tail;
            if (!best || cand > *best) {
              best = cand;
              best_m = m;
            }
          }
          if (best) dp.set(k, l, a, b, *best, best_m);
        }
      }
    }
  }
  return dp;
}

// ---- SolverState -----------------------------------------------------------

SolverState::SolverState(int depth, Ticks budget, int bits) : depth_(depth), budget_(budget), bits_(bits) {
  if (depth < 1 || budget < 0 || (bits != 1 && bits != 2)) {
    throw Error(Errc::InvalidArgument, "bad solver dimensions");
  }
  const double cells = static_cast<double>(depth + 1) * static_cast<double>(budget + 1) * bits;
  if (cells > static_cast<double>(kMaxCells)) {
    throw Error(Errc::InstanceTooLarge, "D table of " + std::to_string(static_cast<long long>(cells)) +
                                            " cells; use a smaller scale");
  }
  cells_.resize(static_cast<std::size_t>(cells));
}

std::size_t SolverState::index(int l, Ticks t, int a) const {
  if (l < 0 || l > depth_ || t < 0 || t > budget_ || a < 0 || a >= bits_) {
    throw Error(Errc::IndexOutOfRange, "D[" + std::to_string(l) + "," + std::to_string(t) + "]");
  }
  return (static_cast<std::size_t>(l) * static_cast<std::size_t>(budget_ + 1) + static_cast<std::size_t>(t)) *
             static_cast<std::size_t>(bits_) +
         static_cast<std::size_t>(a);
}

const DpCell& SolverState::cell(int l, Ticks t, int a) const { return cells_[index(l, t, a)]; }

void SolverState::seed(int l, Ticks t, double score, int k, int alpha, int a) {
  cells_[index(l, t, a)] = DpCell{score, k, alpha, true};
}

void SolverState::seed_base_case() {
  for (Ticks t = 1; t <= budget_; ++t) {
    for (int a = 0; a < bits_; ++a) seed(0, t, 0.0, -1, a, a);
  }
}

void SolverState::relax_base(int l, Ticks t, const LatencyDP& lat, const ImportanceTable& I) {
  DpCell best;
  for (int k = 0; k < l; ++k) {
    const auto block = lat.t_opt(k, l);
    if (!block || *block > t) continue;
    const DpCell& pred = cell(k, t - *block);
    if (!pred.feasible) continue;
    const auto gain = I.at(k, l);
    if (!gain) continue;
    const double cand = pred.score + *gain;
    if (!best.feasible || cand > best.score) best = DpCell{cand, k, 0, true};
  }
  cells_[index(l, t, 0)] = best;
}

void SolverState::relax_extended(int l, Ticks t, int a, const LatencyDP& lat, const ExtImportanceDP& imp) {
  DpCell best;
  for (int k = 0; k < l; ++k) {
    const auto block = lat.t_opt(k, l);
    if (!block || *block > t) continue;
    for (int alpha = 0; alpha < 2; ++alpha) {
      const DpCell& pred = cell(k, t - *block, alpha);
      if (!pred.feasible) continue;
      const auto gain = imp.i_opt(k, l, alpha, a);
      if (!gain) continue;
      const double cand = pred.score + *gain;
      if (!best.feasible || cand > best.score) best = DpCell{cand, k, alpha, true};
    }
  }
  cells_[index(l, t, a)] = best;
}

std::vector<OuterBlock> SolverState::trace(int l, Ticks t, int a, const LatencyDP& lat) const {
  std::vector<OuterBlock> blocks;
  while (l > 0) {
    const DpCell& c = cell(l, t, a);
    if (!c.feasible || c.k < 0) throw Error(Errc::InvalidArgument, "trace through infeasible cell");
    blocks.push_back({c.k, l, c.alpha, a});
    if (c.k == 0) break;
    t -= *lat.t_opt(c.k, l);
    l = c.k;
    a = c.alpha;
  }
  std::reverse(blocks.begin(), blocks.end());
  return blocks;
}

// ---- solvers ---------------------------------------------------------------

Plan solve_base(const TickTable& T, const ImportanceTable& I, Ticks budget) {
  if (I.mode() != PlanMode::base) throw Error(Errc::InvalidArgument, "solve_base needs a base importance table");
  if (I.depth() != T.depth()) throw Error(Errc::InvalidArgument, "table depths differ");
  const int L = T.depth();
  const LatencyDP lat = optimal_latency(T);
  check_budget(lat, budget);

  SolverState state(L, budget, 1);
  state.seed_base_case();
  for (int l = 1; l <= L; ++l) {
    for (Ticks t = 0; t <= budget; ++t) state.relax_base(l, t, lat, I);
  }
  const DpCell& last = state.cell(L, budget);
  if (!last.feasible) throw Error(Errc::InfeasibleBudget, "no block partition has finite importance");

  Plan plan;
  plan.mode = PlanMode::base;
  Ticks latency = 0;
  for (const OuterBlock& blk : state.trace(L, budget, 0, lat)) {
    if (blk.k > 0) {
      plan.A.push_back(blk.k);
      plan.S.push_back(blk.k);
    }
    for (int c : lat.s_opt(blk.k, blk.l)) plan.S.push_back(c);
    latency += *lat.t_opt(blk.k, blk.l);
  }
  plan.B = plan.A;
  finish_plan(plan, T, budget, latency, last.score);
  return plan;
}

Plan solve_extended(const TickTable& T, const ImportanceTable& I, const NetworkSpec& net, Ticks budget) {
  if (I.depth() != T.depth()) throw Error(Errc::InvalidArgument, "table depths differ");
  const int L = T.depth();
  const LatencyDP lat = optimal_latency(T);
  check_budget(lat, budget);
  const ExtImportanceDP imp = optimal_importance(I, net);

  SolverState state(L, budget, 2);
  state.seed_base_case();
  for (int l = 1; l <= L; ++l) {
    for (Ticks t = 0; t <= budget; ++t) {
      for (int a = 0; a < 2; ++a) state.relax_extended(l, t, a, lat, imp);
    }
  }
  int a_last = -1;
  for (int a = 0; a < 2; ++a) {
    const DpCell& c = state.cell(L, budget, a);
    if (c.feasible && (a_last < 0 || c.score > state.cell(L, budget, a_last).score)) a_last = a;
  }
  if (a_last < 0) throw Error(Errc::InfeasibleBudget, "no block partition has finite importance");

  Plan plan;
  plan.mode = PlanMode::extended;
  const std::vector<OuterBlock> blocks = state.trace(L, budget, a_last, lat);
  for (const OuterBlock& blk : blocks) {
    if (blk.k > 0) {
      plan.B.push_back(blk.k);
      if (blk.a == 1) plan.A.push_back(blk.k);
    }
    for (int c : imp.b_opt(blk.k, blk.l, blk.a, blk.b)) plan.B.push_back(c);
  }
  plan.input_bit = blocks.front().a;
  plan.output_bit = blocks.back().b;
  plan.S = latency_optimal_cuts(lat, plan.A);
  const auto latency = merge_latency_of(T, plan.S, 0, L);
  finish_plan(plan, T, budget, *latency, state.cell(L, budget, a_last).score);
  return plan;
}

std::optional<double> importance_of(const ImportanceTable& I, const IndexSet& A, int k, int l) {
  double total = 0.0;
  int prev = k;
  for (int c : A) {
    const auto v = I.at(prev, c);
    if (!v) return std::nullopt;
    total += *v;
    prev = c;
  }
  const auto v = I.at(prev, l);
  if (!v) return std::nullopt;
  return total + *v;
}

std::optional<double> extended_importance_of(const ImportanceTable& I, const IndexSet& A, const IndexSet& B,
                                             int input_bit, int output_bit) {
  const int L = I.depth();
  auto bit = [&](int p) {
    if (p == 0) return input_bit;
    if (p == L) return output_bit;
    return std::binary_search(A.begin(), A.end(), p) ? 1 : 0;
  };
  double total = 0.0;
  int prev = 0;
  auto add = [&](int p) {
    const auto v = I.at(prev, p, bit(prev), bit(p));
    if (!v) return false;
    total += *v;
    prev = p;
    return true;
  };
  for (int b : B) {
    if (!add(b)) return std::nullopt;
  }
  if (!add(L)) return std::nullopt;
  return total;
}

}  // namespace depthcomp
