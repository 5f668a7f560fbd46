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


#include "depthcomp/weights.hpp"

#include <cmath>
#include <random>
#include <string>

#include "depthcomp/error.hpp"
#include "depthcomp/net_io.hpp"

namespace depthcomp {

using nlohmann::json;

NetworkWeights random_weights(const NetworkSpec& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> positive(0.5, 1.5);
  NetworkWeights out;
  for (const ConvLayer& layer : net.layers) {
    LayerWeights lw;
    const int in_pg = layer.in_channels / layer.groups;
    lw.kernel = Kernel4<double>(layer.out_channels, in_pg, layer.kernel_size, layer.groups);
    const double sd = 1.0 / std::sqrt(static_cast<double>(in_pg * layer.kernel_size * layer.kernel_size));
    for (double& w : lw.kernel.weights) w = sd * normal(rng);
    if (layer.has_bias) {
      std::vector<double> bias(static_cast<std::size_t>(layer.out_channels));
      for (double& b : bias) b = 0.1 * normal(rng);
      lw.kernel.bias = std::move(bias);
    }
    if (layer.bn_eps) {
      BatchNormParams bn;
      bn.eps = *layer.bn_eps;
      for (int c = 0; c < layer.out_channels; ++c) {
        bn.gamma.push_back(positive(rng));
        bn.beta.push_back(0.1 * normal(rng));
        bn.mean.push_back(0.1 * normal(rng));
        bn.var.push_back(positive(rng));
      }
      lw.bn = std::move(bn);
    }
    out.push_back(std::move(lw));
  }
  return out;
}

void validate_weights(const NetworkSpec& net, const NetworkWeights& weights) {
  if (static_cast<int>(weights.size()) != net.depth()) {
    throw Error(Errc::ShapeMismatch, "weights cover " + std::to_string(weights.size()) + " layers, network has " +
                                         std::to_string(net.depth()));
  }
  for (int l = 1; l <= net.depth(); ++l) {
    const ConvLayer& layer = net.layer(l);
    const LayerWeights& lw = weights[static_cast<std::size_t>(l - 1)];
    const Kernel4<double>& k = lw.kernel;
    const std::string where = "layer " + std::to_string(l);
    if (k.out_channels != layer.out_channels || k.groups != layer.groups ||
        k.in_channels() != layer.in_channels || k.size != layer.kernel_size) {
      throw Error(Errc::ShapeMismatch, where + ": kernel dims differ from the network");
    }
    if (k.weights.size() != static_cast<std::size_t>(k.out_channels) * k.in_per_group * k.size * k.size) {
      throw Error(Errc::ShapeMismatch, where + ": wrong number of kernel values");
    }
    if (k.bias.has_value() != layer.has_bias) throw Error(Errc::ShapeMismatch, where + ": bias presence differs");
    if (k.bias && static_cast<int>(k.bias->size()) != k.out_channels) {
      throw Error(Errc::ShapeMismatch, where + ": bias length");
    }
    if (lw.bn.has_value() != layer.has_bn()) throw Error(Errc::ShapeMismatch, where + ": BN presence differs");
    if (lw.bn) validate_batch_norm(*lw.bn, layer.out_channels);
    for (double w : k.weights) {
      if (!std::isfinite(w)) throw Error(Errc::NonFiniteValue, where);
    }
  }
}

json weights_to_json(const NetworkWeights& weights) {
  json layers = json::array();
  for (const LayerWeights& lw : weights) {
    const Kernel4<double>& k = lw.kernel;
    json item = {{"out", k.out_channels},
                 {"in_per_group", k.in_per_group},
                 {"k", k.size},
                 {"groups", k.groups},
                 {"weights", k.weights}};
    item["bias"] = k.bias ? json(*k.bias) : json(nullptr);
    if (lw.bn) {
      item["bn"] = {{"gamma", lw.bn->gamma},
                    {"beta", lw.bn->beta},
                    {"mean", lw.bn->mean},
                    {"var", lw.bn->var},
                    {"eps", lw.bn->eps}};
    } else {
      item["bn"] = nullptr;
    }
    layers.push_back(std::move(item));
  }
  return {{"layers", std::move(layers)}};
}

NetworkWeights weights_from_json(const json& doc) {
  NetworkWeights out;
  try {
    for (const json& item : doc.at("layers")) {
      LayerWeights lw;
      lw.kernel = Kernel4<double>(item.at("out").get<int>(), item.at("in_per_group").get<int>(),
                                  item.at("k").get<int>(), item.at("groups").get<int>());
      lw.kernel.weights = item.at("weights").get<std::vector<double>>();
      if (item.contains("bias") && !item.at("bias").is_null()) {
        lw.kernel.bias = item.at("bias").get<std::vector<double>>();
      }
      if (item.contains("bn") && !item.at("bn").is_null()) {
        const json& bn = item.at("bn");
        lw.bn = BatchNormParams{bn.at("gamma").get<std::vector<double>>(), bn.at("beta").get<std::vector<double>>(),
                                bn.at("mean").get<std::vector<double>>(), bn.at("var").get<std::vector<double>>(),
                                bn.value("eps", 1e-5)};
      }
      out.push_back(std::move(lw));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("weights: ") + e.what());
  }
  return out;
}

NetworkWeights load_weights(const std::filesystem::path& path) { return weights_from_json(read_json_file(path)); }

void save_weights(const NetworkWeights& weights, const std::filesystem::path& path) {
  write_text_file(path, weights_to_json(weights).dump() + "\n");
}

}  // namespace depthcomp
