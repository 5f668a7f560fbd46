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


#include <gtest/gtest.h>

#include <filesystem>

#include "depthcomp/error.hpp"
#include "depthcomp/net_io.hpp"
#include "depthcomp/weights.hpp"

namespace depthcomp {
namespace {

const std::filesystem::path kData = DEPTHCOMP_DATA_DIR;

TEST(NetworkJson, RoundTrip) {
  const NetworkSpec net = load_network(kData / "residual_toy.json");
  validate_network(net);
  EXPECT_EQ(network_from_json(network_to_json(net)), net);
}

TEST(NetworkJson, MobileNetV2Backbone) {
  const NetworkSpec net = load_network(kData / "mobilenetv2_1.0.json");
  EXPECT_NO_THROW(validate_network(net));
  EXPECT_EQ(net.depth(), 52);
  EXPECT_EQ(net.skips.size(), 10u);
  EXPECT_EQ(shape_trace(net).back(), (FeatureShape{1280, 7, 7}));
}

TEST(NetworkJson, MissingLayersIsParseError) {
  try {
    network_from_json(nlohmann::json::parse(R"({"input": {"channels": 1, "height": 1, "width": 1}})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
  }
}

TEST(NetworkJson, EmptyLayerListFailsValidation) {
  const NetworkSpec net = network_from_json(
      nlohmann::json::parse(R"({"input": {"channels": 1, "height": 1, "width": 1}, "layers": []})"));
  EXPECT_THROW(validate_network(net), Error);
}

TEST(PlanJson, RoundTrip) {
  Plan plan;
  plan.mode = PlanMode::extended;
  plan.A = {2};
  plan.S = {1, 2};
  plan.B = {2, 3};
  plan.predicted_latency_ticks = 17;
  plan.predicted_latency_ms = 0.17;
  plan.predicted_importance = -0.25;
  plan.budget_ticks = 20;
  plan.budget_ms = 0.2;
  plan.scale = 100;
  plan.input_bit = 1;
  plan.output_bit = 0;
  const Plan back = plan_from_json(plan_to_json(plan));
  EXPECT_EQ(back.A, plan.A);
  EXPECT_EQ(back.S, plan.S);
  EXPECT_EQ(back.B, plan.B);
  EXPECT_EQ(back.mode, plan.mode);
  EXPECT_EQ(back.predicted_importance, plan.predicted_importance);
  EXPECT_EQ(back.scale, plan.scale);
}

TEST(WeightsJson, RoundTripIsExact) {
  const NetworkSpec net = load_network(kData / "residual_toy.json");
  const NetworkWeights w = random_weights(net, 11);
  validate_weights(net, w);
  const NetworkWeights back = weights_from_json(nlohmann::json::parse(weights_to_json(w).dump()));
  ASSERT_EQ(back.size(), w.size());
  for (std::size_t l = 0; l < w.size(); ++l) {
    EXPECT_EQ(back[l].kernel.weights, w[l].kernel.weights);
    EXPECT_EQ(back[l].bn.has_value(), w[l].bn.has_value());
    if (w[l].bn) EXPECT_EQ(back[l].bn->var, w[l].bn->var);
  }
}

TEST(WeightsJson, DimensionMismatchRejected) {
  const NetworkSpec net = load_network(kData / "residual_toy.json");
  NetworkWeights w = random_weights(net, 11);
  w[2].kernel.weights.pop_back();
  EXPECT_THROW(validate_weights(net, w), Error);
}

}  // namespace
}  // namespace depthcomp
