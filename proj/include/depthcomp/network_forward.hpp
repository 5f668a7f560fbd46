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

#include "depthcomp/merge.hpp"
#include "depthcomp/tensor.hpp"

namespace depthcomp {

template <class T>
void apply_activation(Tensor4<T>& x, Activation act);

/// dst += src with centers aligned; src is cropped or zero-extended.
template <class T>
void add_centered(Tensor4<T>& dst, const Tensor4<T>& src);

/// conv -> BN -> residual adds ending here -> activation, per layer.
template <class T>
Tensor4<T> forward_network(const NetworkSpec& net, const NetworkWeights& weights, const Tensor4<T>& x);

/// max_rel_diff is max|diff| / max|reference| per trial, maximized over trials.
struct VerifyReport {
  double max_abs_diff = 0.0;
  double max_rel_diff = 0.0;
  int trials = 0;
  bool single_precision = false;
  double abs_threshold = 1e-9;
  double rel_threshold = 1e-4;

  bool passed() const {
    return single_precision ? max_rel_diff <= rel_threshold : max_abs_diff <= abs_threshold;
  }
};

/// Standard-normal inputs, one seed per trial derived from (seed, trial).
template <class T>
VerifyReport verify_equivalence(const WeightedNetwork& reference, const WeightedNetwork& candidate, int trials,
                                std::uint64_t seed);

Tensor4<double> random_input(int channels, int height, int width, std::uint64_t seed);

}  // namespace depthcomp
