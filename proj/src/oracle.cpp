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
#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>

#include "depthcomp/dp.hpp"
#include "depthcomp/error.hpp"

// Exhaustive reference solvers. Everything here is computed straight from the
// tables; nothing is shared with the DP code path.

namespace depthcomp {

namespace {

using Mask = std::uint32_t;

IndexSet members(Mask mask) {
  IndexSet out;
  for (int p = 1; mask != 0; ++p, mask >>= 1) {
    if (mask & 1u) out.push_back(p);
  }
  return out;
}

std::optional<Ticks> latency_sum(const TickTable& T, Mask cuts) {
  const int L = T.depth();
  Ticks total = 0;
  int prev = 0;
  for (int p = 1; p <= L; ++p) {
    if (p < L && !(cuts & (Mask{1} << (p - 1)))) continue;
    const auto t = T.at(prev, p);
    if (!t) return std::nullopt;
    total += *t;
    prev = p;
  }
  return total;
}

std::optional<double> base_score(const ImportanceTable& I, Mask act) {
  const int L = I.depth();
  double total = 0.0;
  int prev = 0;
  for (int p = 1; p <= L; ++p) {
    if (p < L && !(act & (Mask{1} << (p - 1)))) continue;
    const auto v = I.at(prev, p);
    if (!v) return std::nullopt;
    total += *v;
    prev = p;
  }
  return total;
}

std::optional<double> extended_score(const ImportanceTable& I, Mask act, Mask bounds, int in_bit, int out_bit) {
  const int L = I.depth();
  auto bit = [&](int p) -> int {
    if (p == 0) return in_bit;
    if (p == L) return out_bit;
    return (act >> (p - 1)) & 1u;
  };
  double total = 0.0;
  int prev = 0;
  for (int p = 1; p <= L; ++p) {
    if (p < L && !(bounds & (Mask{1} << (p - 1)))) continue;
    const auto v = I.at(prev, p, bit(prev), bit(p));
    if (!v) return std::nullopt;
    total += *v;
    prev = p;
  }
  return total;
}

void check_size(int depth) {
  if (depth > kOracleMaxDepth) {
    throw Error(Errc::InstanceTooLarge, "L = " + std::to_string(depth) + " > " + std::to_string(kOracleMaxDepth));
  }
}

// Objective first, then smaller |A|, then lexicographic A, then the rest.
// Sets are kept as masks; vectors are only built to settle exact ties.
struct Candidate {
  double score = 0.0;
  Mask A = 0;
  Mask S = 0;
  Mask B = 0;
  int in_bit = 1;
  int out_bit = 0;
  Ticks latency = 0;
  bool set = false;

  bool better_than(const Candidate& o) const {
    if (!o.set) return true;
    if (score != o.score) return score > o.score;
    const int na = std::popcount(A);
    const int nb = std::popcount(o.A);
    if (na != nb) return na < nb;
    return std::forward_as_tuple(members(A), members(S), members(B), in_bit, out_bit) <
           std::forward_as_tuple(members(o.A), members(o.S), members(o.B), o.in_bit, o.out_bit);
  }
};

Plan to_plan(const Candidate& c, PlanMode mode, const TickTable& T, Ticks budget) {
  Plan plan;
  plan.mode = mode;
  plan.A = members(c.A);
  plan.S = members(c.S);
  plan.B = mode == PlanMode::base ? plan.A : members(c.B);
  plan.input_bit = c.in_bit;
  plan.output_bit = c.out_bit;
  plan.predicted_latency_ticks = c.latency;
  plan.predicted_latency_ms = static_cast<double>(c.latency) / static_cast<double>(T.scale());
  plan.predicted_importance = c.score;
  plan.budget_ticks = budget;
  plan.budget_ms = static_cast<double>(budget) / static_cast<double>(T.scale());
  plan.scale = T.scale();
  return plan;
}

}  // namespace

Plan brute_force_base(const TickTable& T, const ImportanceTable& I, Ticks budget) {
  const int L = T.depth();
  check_size(L);
  if (I.mode() != PlanMode::base) throw Error(Errc::InvalidArgument, "base oracle needs a base table");
  const Mask full = (Mask{1} << (L - 1)) - 1;
  Candidate best;
  std::optional<Ticks> fastest;
  for (Mask s = 0;; ++s) {
    const auto lat = latency_sum(T, s);
    if (lat) fastest = fastest ? std::min(*fastest, *lat) : *lat;
    if (lat && *lat < budget) {
      // Every A subset of S, including the empty set.
      for (Mask a = s;; a = (a - 1) & s) {
        if (const auto score = base_score(I, a)) {
          Candidate c{*score, a, s, 0, 1, 0, *lat, true};
          if (c.better_than(best)) best = c;
        }
        if (a == 0) break;
      }
    }
    if (s == full) break;
  }
  if (!best.set) {
    throw Error(Errc::InfeasibleBudget,
                "oracle: no plan under " + std::to_string(budget) + " ticks (fastest " +
                    (fastest ? std::to_string(*fastest) : std::string("none")) + ")");
  }
  return to_plan(best, PlanMode::base, T, budget);
}

Plan brute_force_extended(const TickTable& T, const ImportanceTable& I, const NetworkSpec& net, Ticks budget) {
  const int L = T.depth();
  check_size(L);
  if (I.mode() != PlanMode::extended) throw Error(Errc::InvalidArgument, "extended oracle needs an extended table");
  if (net.depth() != L) throw Error(Errc::InvalidArgument, "network depth differs from tables");
  const Mask full = (Mask{1} << (L - 1)) - 1;

  // Fastest S for every A, over all supersets S of A.
  std::vector<std::optional<Ticks>> best_lat(static_cast<std::size_t>(full) + 1);
  std::vector<Mask> best_cut(static_cast<std::size_t>(full) + 1, 0);
  for (Mask s = 0;; ++s) {
    if (const auto lat = latency_sum(T, s)) {
      for (Mask a = s;; a = (a - 1) & s) {
        auto& slot = best_lat[a];
        if (!slot || *lat < *slot || (*lat == *slot && members(s) < members(best_cut[a]))) {
          slot = *lat;
          best_cut[a] = s;
        }
        if (a == 0) break;
      }
    }
    if (s == full) break;
  }

  Candidate best;
  for (Mask b = 0;; ++b) {
    for (Mask a = b;; a = (a - 1) & b) {
      const auto& lat = best_lat[a];
      if (lat && *lat < budget) {
        for (int in_bit = 0; in_bit < 2; ++in_bit) {
          for (int out_bit = 0; out_bit < 2; ++out_bit) {
            const auto score = extended_score(I, a, b, in_bit, out_bit);
            if (!score) continue;
            Candidate c{*score, a, best_cut[a], b, in_bit, out_bit, *lat, true};
            if (c.better_than(best)) best = c;
          }
        }
      }
      if (a == 0) break;
    }
    if (b == full) break;
  }
  if (!best.set) throw Error(Errc::InfeasibleBudget, "oracle: no plan under " + std::to_string(budget) + " ticks");
  return to_plan(best, PlanMode::extended, T, budget);
}

}  // namespace depthcomp
