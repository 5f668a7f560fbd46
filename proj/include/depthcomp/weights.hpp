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
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "depthcomp/conv.hpp"
#include "depthcomp/net_model.hpp"
#include "depthcomp/tensor.hpp"

namespace depthcomp {

struct LayerWeights {
  Kernel4<double> kernel;
  std::optional<BatchNormParams> bn;
};

using NetworkWeights = std::vector<LayerWeights>;

/// Kernels ~ N(0, 1/fan_in), biases ~ N(0, 0.1), BN gamma and var in
/// [0.5, 1.5], beta and mean ~ N(0, 0.1).
NetworkWeights random_weights(const NetworkSpec& net, std::uint64_t seed);

/// Kernel dims, grouping, bias and BN presence must agree with the network.
void validate_weights(const NetworkSpec& net, const NetworkWeights& weights);

// Weights file:
//   {"layers": [{"out", "in_per_group", "k", "groups", "weights": [...],
//                "bias": [...] | null,
//                "bn": {"gamma", "beta", "mean", "var", "eps"} | null}]}
nlohmann::json weights_to_json(const NetworkWeights& weights);
NetworkWeights weights_from_json(const nlohmann::json& doc);

NetworkWeights load_weights(const std::filesystem::path& path);
void save_weights(const NetworkWeights& weights, const std::filesystem::path& path);

}  // namespace depthcomp
