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


#include "depthcomp/network_forward.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "depthcomp/conv.hpp"
#include "depthcomp/error.hpp"

namespace depthcomp {

template <class T>
void apply_activation(Tensor4<T>& x, Activation act) {
  switch (act) {
    case Activation::identity:
      return;
    case Activation::relu:
      for (T& v : x.data) v = std::max(v, T(0));
      return;
    case Activation::relu6:
      for (T& v : x.data) v = std::min(std::max(v, T(0)), T(6));
      return;
  }
}

template <class T>
void add_centered(Tensor4<T>& dst, const Tensor4<T>& src) {
  if (dst.n != src.n || dst.c != src.c || (dst.h - src.h) % 2 != 0 || (dst.w - src.w) % 2 != 0) {
    throw Error(Errc::ShapeMismatch, "residual operands cannot be center-aligned");
  }
  const int dy = (dst.h - src.h) / 2;
  const int dx = (dst.w - src.w) / 2;
  for (int n = 0; n < dst.n; ++n) {
    for (int c = 0; c < dst.c; ++c) {
      for (int y = std::max(0, dy); y < std::min(dst.h, src.h + dy); ++y) {
        for (int x = std::max(0, dx); x < std::min(dst.w, src.w + dx); ++x) {
          dst.at(n, c, y, x) += src.at(n, c, y - dy, x - dx);
        }
      }
    }
  }
}

template <class T>
Tensor4<T> forward_network(const NetworkSpec& net, const NetworkWeights& weights, const Tensor4<T>& x) {
  if (static_cast<int>(weights.size()) != net.depth()) throw Error(Errc::ShapeMismatch, "weights/network depth");
  std::map<int, Tensor4<T>> saved;
  for (const SkipConnection& s : net.skips) saved.emplace(s.start, Tensor4<T>());
  std::vector<SkipConnection> skips = net.skips;
  std::sort(skips.begin(), skips.end());

  Tensor4<T> cur = x;
  for (int l = 1; l <= net.depth(); ++l) {
    if (auto it = saved.find(l - 1); it != saved.end()) it->second = cur;
    const ConvLayer& layer = net.layer(l);
    const LayerWeights& lw = weights[static_cast<std::size_t>(l - 1)];
    cur = forward_conv(cur, cast_kernel<T>(lw.kernel), layer.stride, layer.padding);
    if (lw.bn) apply_batch_norm(cur, *lw.bn);
    for (const SkipConnection& s : skips) {
      if (s.end == l) add_centered(cur, saved.at(s.start));
    }
    apply_activation(cur, layer.activation);
  }
  return cur;
}

Tensor4<double> random_input(int channels, int height, int width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor4<double> x(1, channels, height, width);
  for (double& v : x.data) v = normal(rng);
  return x;
}

namespace {

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::uint64_t out = 0;
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out;
}

}  // namespace

template <class T>
VerifyReport verify_equivalence(const WeightedNetwork& reference, const WeightedNetwork& candidate, int trials,
                                std::uint64_t seed) {
  const NetworkSpec& a = reference.net;
  const NetworkSpec& b = candidate.net;
  if (a.input_channels != b.input_channels || a.input_height != b.input_height || a.input_width != b.input_width) {
    throw Error(Errc::ShapeMismatch, "networks take different input shapes");
  }
  validate_weights(a, reference.weights);
  validate_weights(b, candidate.weights);
  if (shape_trace(a).back() != shape_trace(b).back()) throw Error(Errc::ShapeMismatch, "output shapes differ");
  if (trials < 1) throw Error(Errc::InvalidArgument, "trials must be >= 1");

  VerifyReport report;
  report.trials = trials;
  report.single_precision = sizeof(T) == sizeof(float);
  double max_abs = 0.0;
  double max_rel = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : max_abs, max_rel)
  for (int trial = 0; trial < trials; ++trial) {
    const Tensor4<T> x =
        cast_tensor<T>(random_input(a.input_channels, a.input_height, a.input_width, trial_seed(seed, trial)));
    const Tensor4<T> ya = forward_network(a, reference.weights, x);
    const Tensor4<T> yb = forward_network(b, candidate.weights, x);
    double trial_abs = 0.0;
    double scale = 0.0;
    for (std::size_t n = 0; n < ya.data.size(); ++n) {
      const double ref = static_cast<double>(ya.data[n]);
      trial_abs = std::max(trial_abs, std::fabs(ref - static_cast<double>(yb.data[n])));
      scale = std::max(scale, std::fabs(ref));
    }
    max_abs = std::max(max_abs, trial_abs);
    if (scale > 0.0) max_rel = std::max(max_rel, trial_abs / scale);
  }
  report.max_abs_diff = max_abs;
  report.max_rel_diff = max_rel;
  return report;
}

template void apply_activation(Tensor4<float>&, Activation);
template void apply_activation(Tensor4<double>&, Activation);
template void add_centered(Tensor4<float>&, const Tensor4<float>&);
template void add_centered(Tensor4<double>&, const Tensor4<double>&);
template Tensor4<float> forward_network(const NetworkSpec&, const NetworkWeights&, const Tensor4<float>&);
template Tensor4<double> forward_network(const NetworkSpec&, const NetworkWeights&, const Tensor4<double>&);
template VerifyReport verify_equivalence<float>(const WeightedNetwork&, const WeightedNetwork&, int, std::uint64_t);
template VerifyReport verify_equivalence<double>(const WeightedNetwork&, const WeightedNetwork&, int, std::uint64_t);

}  // namespace depthcomp
