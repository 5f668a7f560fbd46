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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "depthcomp/net_model.hpp"

namespace depthcomp {

// Network description:
//   {"input": {"channels", "height", "width"},
//    "layers": [{"in", "out", "k", "stride", "pad", "groups", "bias",
//                "bn": {"eps"} | null, "act": "id" | "relu" | "relu6"}],
//    "skips": [{"start", "end"}]}
NetworkSpec network_from_json(const nlohmann::json& doc);
nlohmann::json network_to_json(const NetworkSpec& net);

NetworkSpec load_network(const std::filesystem::path& path);
void save_network(const NetworkSpec& net, const std::filesystem::path& path);

// Plan output:
//   {"A", "S", "B", "predicted_latency_ms", "predicted_importance",
//    "budget_ms", "scale", ...}
nlohmann::json plan_to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& doc);

Plan load_plan(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace depthcomp
