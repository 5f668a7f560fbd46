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


#include "depthcomp/net_io.hpp"

#include <fstream>
#include <sstream>

#include "depthcomp/error.hpp"

namespace depthcomp {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& obj, const char* key) {
  if (!obj.contains(key)) {
    throw Error(Errc::ParseError, std::string("missing field '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return field<T>(obj, key);
}

}  // namespace

NetworkSpec network_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::ParseError, "network document must be an object");
  NetworkSpec net;
  const json& input = doc.contains("input") ? doc.at("input") : json();
  if (!input.is_object()) throw Error(Errc::ParseError, "missing 'input' object");
  net.input_channels = field<int>(input, "channels");
  net.input_height = field<int>(input, "height");
  net.input_width = field<int>(input, "width");

  if (!doc.contains("layers") || !doc.at("layers").is_array()) {
    throw Error(Errc::ParseError, "missing 'layers' array");
  }
  for (const json& item : doc.at("layers")) {
    ConvLayer layer;
    layer.in_channels = field<int>(item, "in");
    layer.out_channels = field<int>(item, "out");
    layer.kernel_size = field<int>(item, "k");
    layer.stride = field_or<int>(item, "stride", 1);
    layer.padding = field_or<int>(item, "pad", 0);
    layer.groups = field_or<int>(item, "groups", 1);
    layer.has_bias = field_or<bool>(item, "bias", false);
    if (item.contains("bn") && !item.at("bn").is_null()) {
      layer.bn_eps = field_or<double>(item.at("bn"), "eps", 1e-5);
    }
    layer.activation = parse_activation(field_or<std::string>(item, "act", "id"));
    net.layers.push_back(layer);
  }
  if (doc.contains("skips")) {
    for (const json& item : doc.at("skips")) {
      net.skips.push_back({field<int>(item, "start"), field<int>(item, "end")});
    }
  }
  return net;
}

json network_to_json(const NetworkSpec& net) {
  json layers = json::array();
  for (const ConvLayer& layer : net.layers) {
    json item = {{"in", layer.in_channels},   {"out", layer.out_channels},
                 {"k", layer.kernel_size},    {"stride", layer.stride},
                 {"pad", layer.padding},      {"groups", layer.groups},
                 {"bias", layer.has_bias},    {"act", std::string(to_string(layer.activation))}};
    item["bn"] = layer.bn_eps ? json{{"eps", *layer.bn_eps}} : json(nullptr);
    layers.push_back(std::move(item));
  }
  json skips = json::array();
  for (const SkipConnection& skip : net.skips) {
    skips.push_back({{"start", skip.start}, {"end", skip.end}});
  }
  return {{"input",
           {{"channels", net.input_channels},
            {"height", net.input_height},
            {"width", net.input_width}}},
          {"layers", std::move(layers)},
          {"skips", std::move(skips)}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

NetworkSpec load_network(const std::filesystem::path& path) {
  return network_from_json(read_json_file(path));
}

void save_network(const NetworkSpec& net, const std::filesystem::path& path) {
  write_text_file(path, network_to_json(net).dump(2) + "\n");
}

}  // namespace depthcomp
