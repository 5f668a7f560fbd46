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
#include <random>
#include <vector>

#include "depthcomp/conv.hpp"
#include "depthcomp/cost_model.hpp"
#include "depthcomp/net_model.hpp"
#include "depthcomp/tensor.hpp"

namespace testutil {

using namespace depthcomp;

// Multiples of 2^-10 in [-1, 1]; sums of these are exact in double.
inline double dyadic_score(std::mt19937_64& rng) {
  return static_cast<double>(std::uniform_int_distribution<int>(-1024, 1024)(rng)) / 1024.0;
}

/// Plain chain of L 1x1 layers; sigma_p is identity with probability p_id.
inline NetworkSpec chain_network(int L, std::mt19937_64& rng, double p_id) {
  NetworkSpec net;
  net.input_channels = 1;
  net.input_height = 4;
  net.input_width = 4;
  std::bernoulli_distribution is_id(p_id);
  for (int l = 1; l <= L; ++l) {
    ConvLayer layer;
    layer.activation = (l == L || is_id(rng)) ? Activation::identity : Activation::relu;
    net.layers.push_back(layer);
  }
  return net;
}

/// Every singleton present; longer blocks dropped with probability p_drop.
inline TickTable random_ticks(int L, std::mt19937_64& rng, double p_drop = 0.2) {
  TickTable T(L);
  std::uniform_int_distribution<int> ticks(1, 20);
  std::bernoulli_distribution drop(p_drop);
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j <= L; ++j) {
      const int t = ticks(rng);
      if (j > i + 1 && drop(rng)) continue;
      T.set(i, j, t);
    }
  }
  return T;
}

inline Ticks singleton_sum(const TickTable& T) {
  Ticks total = 0;
  for (int l = 1; l <= T.depth(); ++l) total += *T.at(l - 1, l);
  return total;
}

/// Base table over the blocks present in T.
inline ImportanceTable random_base_importance(const TickTable& T, std::mt19937_64& rng) {
  ImportanceTable I(T.depth(), PlanMode::base);
  for (int i = 0; i < T.depth(); ++i) {
    for (int j = i + 1; j <= T.depth(); ++j) {
      const double s = dyadic_score(rng);
      if (T.at(i, j)) I.set(i, j, s);
    }
  }
  return I;
}

/// Extended table over the unmasked keys; non-singleton keys dropped with
/// probability p_drop. All-ones chains always survive.
inline ImportanceTable random_extended_importance(const NetworkSpec& net, const TickTable& T, std::mt19937_64& rng,
                                                  double p_drop = 0.2) {
  std::vector<Block> blocks;
  for (int i = 0; i < T.depth(); ++i) {
    for (int j = i + 1; j <= T.depth(); ++j) {
      if (T.at(i, j)) blocks.push_back({i, j});
    }
  }
  ImportanceTable I(T.depth(), PlanMode::extended);
  std::bernoulli_distribution drop(p_drop);
  for (const ImportanceKey& k : feasible_importance_blocks(net, blocks)) {
    const double s = dyadic_score(rng);
    if (k.j > k.i + 1 && drop(rng)) continue;
    I.set(k.i, k.j, k.a, k.b, s);
  }
  return I;
}

template <class T>
Tensor4<T> random_tensor(int n, int c, int h, int w, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor4<T> x(n, c, h, w);
  for (T& v : x.data) v = static_cast<T>(normal(rng));
  return x;
}

inline Kernel4<double> random_kernel(int out, int in_pg, int k, int groups, bool bias, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Kernel4<double> kernel(out, in_pg, k, groups);
  const double sd = 1.0 / std::sqrt(static_cast<double>(in_pg * k * k));
  for (double& w : kernel.weights) w = sd * normal(rng);
  if (bias) {
    std::vector<double> b(static_cast<std::size_t>(out));
    for (double& v : b) v = 0.1 * normal(rng);
    kernel.bias = std::move(b);
  }
  return kernel;
}

inline BatchNormParams random_bn(int channels, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.5, 1.5);
  std::normal_distribution<double> normal(0.0, 0.1);
  BatchNormParams bn;
  for (int c = 0; c < channels; ++c) {
    bn.gamma.push_back(pos(rng));
    bn.beta.push_back(normal(rng));
    bn.mean.push_back(normal(rng));
    bn.var.push_back(pos(rng));
  }
  return bn;
}

template <class T>
double max_abs_diff(const Tensor4<T>& a, const Tensor4<T>& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.data.size(); ++n) {
    m = std::max(m, std::fabs(static_cast<double>(a.data[n]) - static_cast<double>(b.data[n])));
  }
  return m;
}

inline ConvLayer make_layer(int in, int out, int k, int stride = 1, int groups = 1,
                            Activation act = Activation::identity) {
  ConvLayer layer;
  layer.in_channels = in;
  layer.out_channels = out;
  layer.kernel_size = k;
  layer.stride = stride;
  layer.padding = (k - 1) / 2;
  layer.groups = groups;
  layer.activation = act;
  return layer;
}

}  // namespace testutil
