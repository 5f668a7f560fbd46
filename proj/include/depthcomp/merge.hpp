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

#include "depthcomp/cost_model.hpp"
#include "depthcomp/net_model.hpp"
#include "depthcomp/tensor.hpp"
#include "depthcomp/weights.hpp"

namespace depthcomp {

struct MergedShape {
  int in_channels = 0;
  int out_channels = 0;
  int kernel_size = 1;
  int stride = 1;
  int padding = 0;
  int groups = 1;
};

/// Shape of the single convolution replacing layers i+1..j, weights untouched.
/// A lone layer keeps its grouping.
MergedShape merged_shape(const NetworkSpec& net, int i, int j);

struct MergedLayer {
  Kernel4<double> kernel;
  int stride = 1;
  int padding = 0;
  Block source_span;
};

/// Folds BN, densifies, reorders padding, composes left to right and fuses
/// every contained skip. Interior activations must be identity.
MergedLayer merge_segment(const NetworkSpec& net, const NetworkWeights& weights, int i, int j);

struct WeightedNetwork {
  NetworkSpec net;
  NetworkWeights weights;
};

/// The network the plan describes before merging: activations outside A set to
/// identity (extended mode: activation `inserted` where A keeps an identity
/// boundary) and padding of each S-segment moved onto its first layer.
WeightedNetwork prepare_network(const NetworkSpec& net, const NetworkWeights& weights, const Plan& plan,
                                Activation inserted = Activation::relu6);

/// Merges every segment between consecutive points of {0} + S + {L}.
/// Skips spanning several segments are kept as explicit adds.
WeightedNetwork apply_plan(const NetworkSpec& net, const NetworkWeights& weights, const Plan& plan,
                           Activation inserted = Activation::relu6);

}  // namespace depthcomp
