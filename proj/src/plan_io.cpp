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


#include "depthcomp/error.hpp"
#include "depthcomp/net_io.hpp"

namespace depthcomp {

using nlohmann::json;

json plan_to_json(const Plan& plan) {
  json doc = {{"mode", std::string(to_string(plan.mode))},
              {"A", plan.A},
              {"S", plan.S},
              {"B", plan.B},
              {"predicted_latency_ms", plan.predicted_latency_ms},
              {"predicted_latency_ticks", plan.predicted_latency_ticks},
              {"predicted_importance", plan.predicted_importance},
              {"budget_ms", plan.budget_ms},
              {"budget_ticks", plan.budget_ticks},
              {"scale", plan.scale}};
  if (plan.mode == PlanMode::extended) {
    doc["edge_bits"] = {plan.input_bit, plan.output_bit};
  }
  return doc;
}

Plan plan_from_json(const json& doc) {
  Plan plan;
  try {
    plan.mode = parse_plan_mode(doc.value("mode", std::string("base")));
    plan.A = doc.at("A").get<IndexSet>();
    plan.S = doc.at("S").get<IndexSet>();
    plan.B = doc.contains("B") ? doc.at("B").get<IndexSet>() : plan.A;
    plan.predicted_latency_ms = doc.value("predicted_latency_ms", 0.0);
    plan.predicted_latency_ticks = doc.value("predicted_latency_ticks", std::int64_t{0});
    plan.predicted_importance = doc.value("predicted_importance", 0.0);
    plan.budget_ms = doc.value("budget_ms", 0.0);
    plan.budget_ticks = doc.value("budget_ticks", std::int64_t{0});
    plan.scale = doc.value("scale", std::int64_t{1});
    if (doc.contains("edge_bits")) {
      const auto bits = doc.at("edge_bits").get<std::vector<int>>();
      if (bits.size() != 2) throw Error(Errc::ParseError, "edge_bits must have two entries");
      plan.input_bit = bits[0];
      plan.output_bit = bits[1];
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("plan: ") + e.what());
  }
  return plan;
}

Plan load_plan(const std::filesystem::path& path) { return plan_from_json(read_json_file(path)); }

}  // namespace depthcomp
