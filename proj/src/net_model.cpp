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


#include "depthcomp/net_model.hpp"

#include <algorithm>
#include <string>

#include "depthcomp/error.hpp"

namespace depthcomp {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::identity: return "id";
    case Activation::relu: return "relu";
    case Activation::relu6: return "relu6";
  }
  return "id";
}

Activation parse_activation(std::string_view name) {
  if (name == "id" || name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "relu6") return Activation::relu6;
  throw Error(Errc::ParseError, "unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(PlanMode mode) {
  return mode == PlanMode::base ? "base" : "extended";
}

PlanMode parse_plan_mode(std::string_view name) {
  if (name == "base") return PlanMode::base;
  if (name == "extended") return PlanMode::extended;
  throw Error(Errc::ParseError, "unknown mode '" + std::string(name) + "'");
}

int conv_output_size(int input, int kernel, int stride, int padding) {
  const int span = input + 2 * padding - kernel;
  if (span < 0) return 0;
  return span / stride + 1;
}

namespace {

void validate_layer(const ConvLayer& layer, int l) {
  const std::string where = "layer " + std::to_string(l);
  if (layer.in_channels <= 0 || layer.out_channels <= 0 || layer.kernel_size <= 0 ||
      layer.stride <= 0 || layer.padding < 0 || layer.groups <= 0) {
    throw Error(Errc::InvalidLayer, where + ": non-positive count or negative padding");
  }
  if (layer.in_channels % layer.groups != 0 || layer.out_channels % layer.groups != 0) {
    throw Error(Errc::InvalidLayer, where + ": channels not divisible by groups");
  }
  if (layer.kernel_size % 2 == 0) {
    throw Error(Errc::NonOddKernel, where);
  }
  if (layer.bn_eps && !(*layer.bn_eps > 0.0)) {
    throw Error(Errc::InvalidLayer, where + ": BN eps must be positive");
  }
}

bool crosses(const SkipConnection& a, const SkipConnection& b) {
  if (a == b) return true;
  return (a.start < b.start && b.start < a.end && a.end < b.end) ||
         (b.start < a.start && a.start < b.end && b.end < a.end);
}

std::string pair_name(const SkipConnection& s) {
  return "(" + std::to_string(s.start) + "," + std::to_string(s.end) + ")";
}

}  // namespace

void validate_network(const NetworkSpec& net) {
  if (net.input_channels <= 0 || net.input_height <= 0 || net.input_width <= 0) {
    throw Error(Errc::InvalidLayer, "input shape must be positive");
  }
  const int L = net.depth();
  if (L == 0) {
    throw Error(Errc::InvalidLayer, "network has no layers");
  }
  int channels = net.input_channels;
  for (int l = 1; l <= L; ++l) {
    const ConvLayer& layer = net.layer(l);
    validate_layer(layer, l);
    if (layer.in_channels != channels) {
      throw Error(Errc::ChannelMismatch, "layer " + std::to_string(l));
    }
    channels = layer.out_channels;
  }
  if (net.layer(L).activation != Activation::identity) {
    throw Error(Errc::InvalidLayer, "last activation must be identity");
  }

  for (std::size_t a = 0; a < net.skips.size(); ++a) {
    for (std::size_t b = a + 1; b < net.skips.size(); ++b) {
      if (crosses(net.skips[a], net.skips[b])) {
        throw Error(Errc::CrossingSkips, pair_name(net.skips[a]) + " and " + pair_name(net.skips[b]));
      }
    }
  }
  if (net.skips.empty()) return;

  const std::vector<FeatureShape> shapes = shape_trace(net);
  for (const SkipConnection& skip : net.skips) {
    if (skip.start < 0 || skip.start >= skip.end || skip.end > L) {
      throw Error(Errc::IndexOutOfRange, "skip " + pair_name(skip));
    }
    int stride = 1;
    for (int l = skip.start + 1; l <= skip.end; ++l) stride *= net.layer(l).stride;
    // Maps of different size are added center-aligned.
    const FeatureShape& from = shapes[static_cast<std::size_t>(skip.start)];
    const FeatureShape& to = shapes[static_cast<std::size_t>(skip.end)];
    if (stride != 1 || from.channels != to.channels || (from.height - to.height) % 2 != 0 ||
        (from.width - to.width) % 2 != 0) {
      throw Error(Errc::SkipShapeMismatch, "skip " + pair_name(skip));
    }
  }
}

std::vector<FeatureShape> shape_trace(const NetworkSpec& net) {
  std::vector<FeatureShape> shapes;
  shapes.reserve(net.layers.size() + 1);
  FeatureShape current{net.input_channels, net.input_height, net.input_width};
  shapes.push_back(current);
  for (int l = 1; l <= net.depth(); ++l) {
    const ConvLayer& layer = net.layer(l);
    current.channels = layer.out_channels;
    current.height = conv_output_size(current.height, layer.kernel_size, layer.stride, layer.padding);
    current.width = conv_output_size(current.width, layer.kernel_size, layer.stride, layer.padding);
    if (current.height <= 0 || current.width <= 0) {
      throw Error(Errc::NonPositiveSpatialDim, "layer " + std::to_string(l));
    }
    shapes.push_back(current);
  }
  return shapes;
}

SegmentView segment_view(const NetworkSpec& net, int i, int j) {
  if (i < 0 || i >= j || j > net.depth()) {
    throw Error(Errc::IndexOutOfRange,
                "segment (" + std::to_string(i) + "," + std::to_string(j) + ")");
  }
  SegmentView view;
  view.begin = i;
  view.end = j;
  view.layers = std::span<const ConvLayer>(net.layers).subspan(static_cast<std::size_t>(i),
                                                                static_cast<std::size_t>(j - i));
  for (const SkipConnection& skip : net.skips) {
    const bool start_inside = i < skip.start && skip.start < j;
    const bool end_inside = i < skip.end && skip.end < j;
    if (i <= skip.start && skip.end <= j) {
      view.contained.push_back(skip);
    } else if (start_inside != end_inside) {
      view.straddling.push_back(skip);
    }
  }
  std::sort(view.contained.begin(), view.contained.end());
  std::sort(view.straddling.begin(), view.straddling.end());
  return view;
}

bool is_subset(const IndexSet& inner, const IndexSet& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

void validate_plan(const Plan& plan, int depth) {
  auto check = [depth](const IndexSet& set, const char* name) {
    for (std::size_t n = 0; n < set.size(); ++n) {
      if (set[n] < 1 || set[n] > depth - 1) {
        throw Error(Errc::InvalidPlan, std::string(name) + " index " + std::to_string(set[n]) +
                                           " outside [1, L-1]");
      }
      if (n > 0 && set[n] <= set[n - 1]) {
        throw Error(Errc::InvalidPlan, std::string(name) + " is not strictly increasing");
      }
    }
  };
  check(plan.A, "A");
  check(plan.S, "S");
  check(plan.B, "B");
  if (!is_subset(plan.A, plan.S)) throw Error(Errc::InvalidPlan, "A is not a subset of S");
  if (plan.mode == PlanMode::extended && !is_subset(plan.A, plan.B)) throw Error(Errc::InvalidPlan, "A is not a subset of B");
}

}  // namespace depthcomp
