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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace depthcomp {

enum class Activation { identity, relu, relu6 };

std::string_view to_string(Activation act);
Activation parse_activation(std::string_view name);

/// One convolution f_l followed by its activation sigma_l. Square kernels,
/// symmetric zero padding. BN statistics are carried by the weights; the
/// description only records that a BN layer follows the convolution.
struct ConvLayer {
  int in_channels = 1;
  int out_channels = 1;
  int kernel_size = 1;
  int stride = 1;
  int padding = 0;
  int groups = 1;
  bool has_bias = false;
  std::optional<double> bn_eps;
  Activation activation = Activation::identity;

  bool has_bn() const { return bn_eps.has_value(); }
  bool operator==(const ConvLayer&) const = default;
};

/// Residual add: the output of layer `end` (before its activation) receives
/// the feature map at boundary `start`, i.e. the input of layer start+1.
struct SkipConnection {
  int start = 0;
  int end = 0;

  bool operator==(const SkipConnection&) const = default;
  auto operator<=>(const SkipConnection&) const = default;
};

struct NetworkSpec {
  int input_channels = 1;
  int input_height = 1;
  int input_width = 1;
  std::vector<ConvLayer> layers;
  std::vector<SkipConnection> skips;

  /// L, the number of convolution layers.
  int depth() const { return static_cast<int>(layers.size()); }

  /// Layer l in 1-based indexing (l in [1, L]).
  const ConvLayer& layer(int l) const { return layers.at(static_cast<std::size_t>(l - 1)); }
  ConvLayer& layer(int l) { return layers.at(static_cast<std::size_t>(l - 1)); }

  /// sigma at boundary p for 1 <= p <= L.
  Activation activation_at(int p) const { return layer(p).activation; }

  bool operator==(const NetworkSpec&) const = default;
};

struct FeatureShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  bool operator==(const FeatureShape&) const = default;
};

/// Throws Error on the first violated invariant.
void validate_network(const NetworkSpec& net);

/// Shapes at boundaries 0..L; entry 0 is the input shape.
std::vector<FeatureShape> shape_trace(const NetworkSpec& net);

/// Standard output-size rule, floor((n + 2p - k) / s) + 1. Returns a value
/// <= 0 when the kernel does not fit.
int conv_output_size(int input, int kernel, int stride, int padding);

struct SegmentView {
  int begin = 0;  // i
  int end = 0;    // j
  std::span<const ConvLayer> layers;           // layers i+1..j
  std::vector<SkipConnection> contained;       // i <= start and end <= j
  std::vector<SkipConnection> straddling;      // exactly one endpoint strictly inside (i, j)
};

SegmentView segment_view(const NetworkSpec& net, int i, int j);

/// Sorted, duplicate-free set of boundary indices.
using IndexSet = std::vector<int>;

enum class PlanMode { base, extended };

std::string_view to_string(PlanMode mode);
PlanMode parse_plan_mode(std::string_view name);

struct Plan {
  PlanMode mode = PlanMode::base;
  IndexSet A;  // activations kept
  IndexSet S;  // merge-segment boundaries
  IndexSet B;  // importance-block boundaries; equals A in base mode
  std::int64_t predicted_latency_ticks = 0;
  double predicted_latency_ms = 0.0;
  double predicted_importance = 0.0;
  std::int64_t budget_ticks = 0;
  double budget_ms = 0.0;
  std::int64_t scale = 1;
  // Edge bits chosen at boundary 0 and boundary L (extended mode only).
  int input_bit = 1;
  int output_bit = 0;
};

/// Checks A subset S, A subset B, ranges within [1, L-1], sortedness.
void validate_plan(const Plan& plan, int depth);

bool is_subset(const IndexSet& inner, const IndexSet& outer);

}  // namespace depthcomp
