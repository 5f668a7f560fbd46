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

LatencyDP::LatencyDP(int depth) : depth_(depth) {
  const auto n = static_cast<std::size_t>(depth + 1) * static_cast<std::size_t>(depth + 1);
  t_opt_.resize(n);
  split_.assign(n, -1);
  for (int k = 0; k <= depth; ++k) set(k, k, 0, k);
}

std::size_t LatencyDP::index(int k, int l) const {
  if (k < 0 || l < k || l > depth_) {
    throw Error(Errc::IndexOutOfRange, "T_opt(" + std::to_string(k) + "," + std::to_string(l) + ")");
  }
  return static_cast<std::size_t>(k) * static_cast<std::size_t>(depth_ + 1) + static_cast<std::size_t>(l);
}

std::optional<Ticks> LatencyDP::t_opt(int k, int l) const { return t_opt_[index(k, l)]; }

int LatencyDP::split(int k, int l) const { return split_[index(k, l)]; }

void LatencyDP::set(int k, int l, Ticks ticks, int split) {
  t_opt_[index(k, l)] = ticks;
  split_[index(k, l)] = split;
}

IndexSet LatencyDP::s_opt(int k, int l) const {
  IndexSet cuts;
  int end = l;
  while (end > k) {
    const int m = split(k, end);
    if (m < k) throw Error(Errc::NoFeasiblePartition, "(" + std::to_string(k) + "," + std::to_string(end) + ")");
    if (m > k) cuts.push_back(m);
    end = m;
  }
  std::reverse(cuts.begin(), cuts.end());
  return cuts;
}

LatencyDP optimal_latency(const TickTable& T) {
  const int L = T.depth();
  LatencyDP dp(L);
  for (int k = 0; k < L; ++k) {
    for (int l = k + 1; l <= L; ++l) {
      std::optional<Ticks> best;
      int best_m = -1;
      for (int m = k; m < l; ++m) {
        const auto head = dp.t_opt(k, m);
        const auto tail = T.at(m, l);
        if (!head || !tail) continue;
        const Ticks total = *head + *tail;
        if (!best || total < *best) {
          best = total;
          best_m = m;
        }
      }
      if (!best) {
        // Only reachable when some singleton block is missing.
        continue;
      }
      dp.set(k, l, *best, best_m);
    }
  }
  if (!dp.t_opt(0, L)) throw Error(Errc::NoFeasiblePartition, "(0," + std::to_string(L) + ")");
  return dp;
}

std::optional<Ticks> merge_latency_of(const TickTable& T, const IndexSet& cuts, int k, int l) {
  Ticks total = 0;
  int prev = k;
  for (int c : cuts) {
    if (c <= prev || c >= l) throw Error(Errc::IndexOutOfRange, "cut " + std::to_string(c));
    const auto t = T.at(prev, c);
    if (!t) return std::nullopt;
    total += *t;
    prev = c;
  }
  const auto t = T.at(prev, l);
  if (!t) return std::nullopt;
  return total + *t;
}

IndexSet latency_optimal_cuts(const LatencyDP& lat, const IndexSet& A) {
  IndexSet out;
  int prev = 0;
  auto add_block = [&](int k, int l) {
    for (int c : lat.s_opt(k, l)) out.push_back(c);
    if (l < lat.depth()) out.push_back(l);
  };
  for (int a : A) {
    add_block(prev, a);
    prev = a;
  }
  add_block(prev, lat.depth());
  return out;
}

}  // namespace depthcomp
