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


#include "depthcomp/merge.hpp"

#include <algorithm>
#include <string>

#include "depthcomp/conv.hpp"
#include "depthcomp/error.hpp"

namespace depthcomp {

namespace {

std::string span_name(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

void require_mergeable(const SegmentView& view) {
  if (!view.straddling.empty()) {
    const SkipConnection& s = view.straddling.front();
    throw Error(Errc::InfeasibleSegment, span_name(view.begin, view.end) + " cuts skip " + span_name(s.start, s.end));
  }
}

struct Piece {
  Kernel4<double> kernel;
  int stride = 1;
  int padding = 0;
};

class SegmentMerger {
 public:
  SegmentMerger(const NetworkSpec& net, const NetworkWeights& weights, std::vector<SkipConnection> skips)
      : net_(net), weights_(weights), skips_(std::move(skips)) {}

  Piece merge(int a, int b) const {
    const bool fused = std::find(skips_.begin(), skips_.end(), SkipConnection{a, b}) != skips_.end();
    std::vector<Piece> pieces;
    for (int p = a; p < b;) {
      int inner_end = -1;
      for (const SkipConnection& s : skips_) {
        if (s.start == p && s.end <= b && !(s.start == a && s.end == b)) inner_end = std::max(inner_end, s.end);
      }
      if (inner_end > 0) {
        pieces.push_back(merge(p, inner_end));
        p = inner_end;
      } else {
        pieces.push_back(layer_piece(p + 1));
        ++p;
      }
    }
    Piece cur = std::move(pieces.front());
    if (pieces.size() > 1 || fused) cur.kernel = expand_depthwise(cur.kernel);
    for (std::size_t n = 1; n < pieces.size(); ++n) {
      const Piece& next = pieces[n];
      cur.kernel = compose_kernels(expand_depthwise(next.kernel), cur.kernel, cur.stride);
      cur.padding += next.padding * cur.stride;
      cur.stride *= next.stride;
    }
    if (fused) cur.kernel = fuse_skip(cur.kernel, cur.stride);
    return cur;
  }

 private:
  Piece layer_piece(int l) const {
    const ConvLayer& layer = net_.layer(l);
    const LayerWeights& lw = weights_[static_cast<std::size_t>(l - 1)];
    Piece piece{lw.kernel, layer.stride, layer.padding};
    if (lw.bn) piece.kernel = fold_bn(piece.kernel, *lw.bn);
    return piece;
  }

  const NetworkSpec& net_;
  const NetworkWeights& weights_;
  std::vector<SkipConnection> skips_;
};

bool is_member(const IndexSet& set, int p) { return std::binary_search(set.begin(), set.end(), p); }

IndexSet cut_points(const Plan& plan, int depth) {
  IndexSet cuts{0};
  cuts.insert(cuts.end(), plan.S.begin(), plan.S.end());
  cuts.push_back(depth);
  return cuts;
}

}  // namespace

MergedShape merged_shape(const NetworkSpec& net, int i, int j) {
  const SegmentView view = segment_view(net, i, j);
  require_mergeable(view);
  MergedShape shape;
  shape.in_channels = net.layer(i + 1).in_channels;
  shape.out_channels = net.layer(j).out_channels;
  shape.groups = j == i + 1 ? net.layer(j).groups : 1;
  shape.kernel_size = 0;
  int stride = 1;
  for (int l = i + 1; l <= j; ++l) {
    const ConvLayer& layer = net.layer(l);
    shape.kernel_size += l == i + 1 ? layer.kernel_size : (layer.kernel_size - 1) * stride;
    shape.padding += layer.padding * stride;
    stride *= layer.stride;
  }
  shape.stride = stride;
  return shape;
}

MergedLayer merge_segment(const NetworkSpec& net, const NetworkWeights& weights, int i, int j) {
  const SegmentView view = segment_view(net, i, j);
  require_mergeable(view);
  for (int l = i + 1; l < j; ++l) {
    if (net.activation_at(l) != Activation::identity) {
      throw Error(Errc::ActivationInside, "sigma_" + std::to_string(l) + " in segment " + span_name(i, j));
    }
  }
  if (static_cast<int>(weights.size()) != net.depth()) throw Error(Errc::ShapeMismatch, "weights/network depth");
  const SegmentMerger merger(net, weights, view.contained);
  Piece piece = merger.merge(i, j);
  return MergedLayer{std::move(piece.kernel), piece.stride, piece.padding, Block{i, j}};
}

WeightedNetwork prepare_network(const NetworkSpec& net, const NetworkWeights& weights, const Plan& plan,
                                Activation inserted) {
  const int L = net.depth();
  validate_plan(plan, L);
  WeightedNetwork out{net, weights};
  for (int p = 1; p < L; ++p) {
    const Activation original = net.activation_at(p);
    Activation act = Activation::identity;
    if (is_member(plan.A, p)) {
      act = plan.mode == PlanMode::extended && original == Activation::identity ? inserted : original;
    }
    out.net.layer(p).activation = act;
  }
  const IndexSet cuts = cut_points(plan, L);
  for (std::size_t n = 0; n + 1 < cuts.size(); ++n) {
    const int i = cuts[n];
    const int j = cuts[n + 1];
    const std::vector<int> pads = reorder_padding(segment_view(net, i, j).layers);
    for (int l = i + 1; l <= j; ++l) out.net.layer(l).padding = pads[static_cast<std::size_t>(l - i - 1)];
  }
  return out;
}

WeightedNetwork apply_plan(const NetworkSpec& net, const NetworkWeights& weights, const Plan& plan,
                           Activation inserted) {
  const WeightedNetwork prepared = prepare_network(net, weights, plan, inserted);
  const int L = net.depth();
  const IndexSet cuts = cut_points(plan, L);

  WeightedNetwork out;
  out.net.input_channels = net.input_channels;
  out.net.input_height = net.input_height;
  out.net.input_width = net.input_width;
  for (std::size_t n = 0; n + 1 < cuts.size(); ++n) {
    const int i = cuts[n];
    const int j = cuts[n + 1];
    MergedLayer merged = merge_segment(prepared.net, prepared.weights, i, j);
    ConvLayer layer;
    layer.in_channels = merged.kernel.in_channels();
    layer.out_channels = merged.kernel.out_channels;
    layer.kernel_size = merged.kernel.size;
    layer.stride = merged.stride;
    layer.padding = merged.padding;
    layer.groups = merged.kernel.groups;
    layer.has_bias = merged.kernel.bias.has_value();
    layer.activation = prepared.net.activation_at(j);
    out.net.layers.push_back(layer);
    out.weights.push_back(LayerWeights{std::move(merged.kernel), std::nullopt});
  }
  for (const SkipConnection& skip : net.skips) {
    const auto start = std::find(cuts.begin(), cuts.end(), skip.start);
    const auto end = std::find(cuts.begin(), cuts.end(), skip.end);
    if (start == cuts.end() || end == cuts.end()) continue;  // inside one segment, already fused
    if (end - start == 1) continue;                           // exactly one segment, fused
    out.net.skips.push_back({static_cast<int>(start - cuts.begin()), static_cast<int>(end - cuts.begin())});
  }
  return out;
}

}  // namespace depthcomp
