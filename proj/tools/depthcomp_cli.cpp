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


#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "depthcomp/cost_model.hpp"
#include "depthcomp/dp.hpp"
#include "depthcomp/error.hpp"
#include "depthcomp/merge.hpp"
#include "depthcomp/net_io.hpp"
#include "depthcomp/network_forward.hpp"
#include "depthcomp/weights.hpp"

using namespace depthcomp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitVerify = 3;

struct TableOptions {
  std::string network;
  std::string latency;
  std::string importance;
  std::uint64_t seed = 0;
  std::string mode = "base";
  double mac_cost = LatencyModelParams{}.mac_cost;
  double overhead = LatencyModelParams{}.layer_overhead;
  bool no_forbid = false;
};

struct PlanOptions {
  TableOptions tables;
  double budget_ms = 0.0;
  std::int64_t scale = 100;
  double alpha = 0.0;
  bool oracle = false;
  std::string out;
};

void add_table_options(CLI::App* cmd, TableOptions& o) {
  cmd->add_option("--network", o.network, "network description (JSON)")->required()->check(CLI::ExistingFile);
  auto* lat = cmd->add_option("--latency", o.latency, "latency CSV (i,j,ms); synthesized when absent")
                  ->check(CLI::ExistingFile);
  cmd->add_option("--importance", o.importance, "importance CSV; synthesized when absent")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "seed for synthetic importance");
  cmd->add_option("--mode", o.mode, "base or extended")->check(CLI::IsMember({"base", "extended"}));
  cmd->add_option("--mac-cost", o.mac_cost, "synthetic model: ms per MAC")->excludes(lat);
  cmd->add_option("--overhead", o.overhead, "synthetic model: ms per layer")->excludes(lat);
  cmd->add_flag("--no-forbid-wide-after-stride", o.no_forbid, "allow K>1 layers after a strided layer in a block");
}

NetworkSpec read_network(const std::string& path) {
  NetworkSpec net = load_network(path);
  validate_network(net);
  return net;
}

struct Tables {
  NetworkSpec net;
  CostTable latency;
  ImportanceTable importance;
};

Tables build_tables(const TableOptions& o) {
  NetworkSpec net = read_network(o.network);
  const PlanMode mode = parse_plan_mode(o.mode);
  const std::vector<Block> blocks = feasible_latency_blocks(net, !o.no_forbid);
  CostTable latency = o.latency.empty() ? synthesize_latency(net, blocks, {o.mac_cost, o.overhead})
                                        : load_cost_table(o.latency, net.depth());
  for (int l = 1; l <= net.depth(); ++l) {
    if (!latency.at(l - 1, l)) {
      throw Error(Errc::ParseError, "latency table lacks singleton block (" + std::to_string(l - 1) + "," +
                                        std::to_string(l) + ")");
    }
  }
  ImportanceTable importance = o.importance.empty() ? synthesize_importance(net, blocks, mode, o.seed)
                                                    : load_importance_table(o.importance, net, mode);
  return {std::move(net), std::move(latency), std::move(importance)};
}

Plan run_solver(const PlanOptions& o, bool oracle_only, std::ostream& log) {
  Tables t = build_tables(o.tables);
  if (o.budget_ms <= 0.0) throw Error(Errc::InvalidArgument, "--budget-ms must be positive");
  if (o.alpha != 0.0) {
    const std::vector<double> drops = size_one_scores(t.importance);
    t.importance = normalize_importance(t.importance, o.alpha, drops);
  }
  const Discretized d = discretize(t.latency, o.budget_ms, o.scale);
  const bool extended = t.importance.mode() == PlanMode::extended;
  const LatencyDP lat = optimal_latency(d.table);
  const Ticks floor = *lat.t_opt(0, t.net.depth());
  log << "L = " << t.net.depth() << ", T_opt[0,L] = " << floor << " ticks ("
      << static_cast<double>(floor) / static_cast<double>(o.scale) << " ms), budget = " << d.budget << " ticks\n";

  auto oracle = [&] {
    return extended ? brute_force_extended(d.table, t.importance, t.net, d.budget)
                    : brute_force_base(d.table, t.importance, d.budget);
  };
  Plan plan = oracle_only ? oracle()
                          : (extended ? solve_extended(d.table, t.importance, t.net, d.budget)
                                      : solve_base(d.table, t.importance, d.budget));
  plan.budget_ms = o.budget_ms;
  if (o.oracle && !oracle_only) {
    const Plan reference = oracle();
    if (reference.predicted_importance != plan.predicted_importance) {
      log << "oracle disagrees: dp " << plan.predicted_importance << " vs oracle " << reference.predicted_importance
          << "\n";
      throw std::logic_error("oracle mismatch");
    }
    log << "oracle agrees: objective " << reference.predicted_importance << "\n";
  }
  log << "A = " << nlohmann::json(plan.A).dump() << ", S = " << nlohmann::json(plan.S).dump()
      << ", latency = " << plan.predicted_latency_ms << " ms, importance = " << plan.predicted_importance << "\n";
  return plan;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

int exit_code_for(const Error& e) { return e.code() == Errc::InfeasibleBudget ? kExitInfeasible : kExitInput; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latency-aware depth compression planner and merge engine"};
  app.require_subcommand(1);

  // gen-tables
  TableOptions gen;
  std::string gen_latency_out = "latency.csv";
  std::string gen_importance_out = "importance.csv";
  auto* cmd_gen = app.add_subcommand("gen-tables", "write synthetic latency and importance tables");
  cmd_gen->add_option("--network", gen.network, "network description (JSON)")->required()->check(CLI::ExistingFile);
  cmd_gen->add_option("--seed", gen.seed, "importance seed");
  cmd_gen->add_option("--mode", gen.mode, "base or extended")->check(CLI::IsMember({"base", "extended"}));
  cmd_gen->add_option("--mac-cost", gen.mac_cost, "ms per MAC");
  cmd_gen->add_option("--overhead", gen.overhead, "ms per layer");
  cmd_gen->add_flag("--no-forbid-wide-after-stride", gen.no_forbid, "allow K>1 layers after a strided layer");
  cmd_gen->add_option("--latency-out", gen_latency_out, "latency CSV path");
  cmd_gen->add_option("--importance-out", gen_importance_out, "importance CSV path");

  // gen-weights
  std::string gw_network;
  std::string gw_out = "weights.json";
  std::uint64_t gw_seed = 0;
  auto* cmd_gw = app.add_subcommand("gen-weights", "write seeded random weights for a network");
  cmd_gw->add_option("--network", gw_network)->required()->check(CLI::ExistingFile);
  cmd_gw->add_option("--out", gw_out);
  cmd_gw->add_option("--seed", gw_seed);

  // plan / oracle
  PlanOptions plan_opts;
  PlanOptions oracle_opts;
  for (auto [name, opts, help] : {std::tuple{"plan", &plan_opts, "solve the surrogate problem with DP"},
                                  std::tuple{"oracle", &oracle_opts, "solve by exhaustive enumeration"}}) {
    auto* cmd = app.add_subcommand(name, help);
    add_table_options(cmd, opts->tables);
    cmd->add_option("--budget-ms", opts->budget_ms, "latency budget T0 in ms")->required();
    cmd->add_option("--scale", opts->scale, "ticks per ms")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", opts->alpha, "importance normalization coefficient");
    cmd->add_option("--out", opts->out, "plan JSON path (default stdout)");
    if (opts == &plan_opts) cmd->add_flag("--oracle", opts->oracle, "cross-check against brute force");
  }

  // apply
  std::string ap_network, ap_weights, ap_plan, ap_out_net = "merged.json", ap_out_weights = "merged_weights.json";
  std::string ap_prep_net, ap_prep_weights, ap_act = "relu6";
  auto* cmd_apply = app.add_subcommand("apply", "merge a network according to a plan");
  cmd_apply->add_option("--network", ap_network)->required()->check(CLI::ExistingFile);
  cmd_apply->add_option("--weights", ap_weights)->required()->check(CLI::ExistingFile);
  cmd_apply->add_option("--plan", ap_plan)->required()->check(CLI::ExistingFile);
  cmd_apply->add_option("--out-network", ap_out_net);
  cmd_apply->add_option("--out-weights", ap_out_weights);
  cmd_apply->add_option("--prepared-network", ap_prep_net, "also write the unmerged, plan-prepared network");
  cmd_apply->add_option("--prepared-weights", ap_prep_weights);
  cmd_apply->add_option("--inserted-activation", ap_act, "activation placed at identity boundaries kept in A")
      ->check(CLI::IsMember({"relu", "relu6"}));

  // verify
  std::string vf_original, vf_original_weights, vf_merged, vf_merged_weights, vf_plan, vf_act = "relu6";
  int vf_trials = 8;
  std::uint64_t vf_seed = 0;
  bool vf_f32 = false;
  bool vf_f64 = false;
  int vf_height = 0;
  int vf_width = 0;
  auto* cmd_verify = app.add_subcommand("verify", "compare two networks on random inputs");
  cmd_verify->add_option("--original", vf_original)->required()->check(CLI::ExistingFile);
  cmd_verify->add_option("--original-weights", vf_original_weights)->required()->check(CLI::ExistingFile);
  cmd_verify->add_option("--merged", vf_merged)->required()->check(CLI::ExistingFile);
  cmd_verify->add_option("--merged-weights", vf_merged_weights)->required()->check(CLI::ExistingFile);
  cmd_verify->add_option("--plan", vf_plan, "prepare the original with this plan first")->check(CLI::ExistingFile);
  cmd_verify->add_option("--inserted-activation", vf_act)->check(CLI::IsMember({"relu", "relu6"}));
  cmd_verify->add_option("--trials", vf_trials)->check(CLI::PositiveNumber);
  cmd_verify->add_option("--seed", vf_seed);
  cmd_verify->add_option("--height", vf_height, "override input height of both networks");
  cmd_verify->add_option("--width", vf_width, "override input width of both networks");
  auto* f32 = cmd_verify->add_flag("--f32", vf_f32, "32-bit elements");
  cmd_verify->add_flag("--f64", vf_f64, "64-bit elements (default)")->excludes(f32);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*cmd_gen) {
      Tables t = build_tables(gen);
      const std::vector<Block> blocks = feasible_latency_blocks(t.net, !gen.no_forbid);
      const std::size_t ext_blocks = feasible_importance_blocks(t.net, blocks).size();
      write_text_file(gen_latency_out, cost_table_csv(t.latency));
      write_text_file(gen_importance_out, importance_table_csv(t.importance));
      std::cout << "L = " << t.net.depth() << "\nlatency blocks: " << blocks.size()
                << "\nimportance blocks: " << ext_blocks << "\n";
      return kExitOk;
    }
    if (*cmd_gw) {
      const NetworkSpec net = read_network(gw_network);
      save_weights(random_weights(net, gw_seed), gw_out);
      return kExitOk;
    }
    for (auto [cmd, opts] : {std::pair{app.get_subcommand("plan"), &plan_opts},
                             std::pair{app.get_subcommand("oracle"), &oracle_opts}}) {
      if (!*cmd) continue;
      try {
        const Plan plan = run_solver(*opts, opts == &oracle_opts, std::cerr);
        emit(plan_to_json(plan).dump(2) + "\n", opts->out);
        return kExitOk;
      } catch (const std::logic_error&) {
        return kExitVerify;
      }
    }
    if (*cmd_apply) {
      const NetworkSpec net = read_network(ap_network);
      const NetworkWeights weights = load_weights(ap_weights);
      validate_weights(net, weights);
      const Plan plan = load_plan(ap_plan);
      const Activation inserted = parse_activation(ap_act);
      const WeightedNetwork merged = apply_plan(net, weights, plan, inserted);
      save_network(merged.net, ap_out_net);
      save_weights(merged.weights, ap_out_weights);
      if (!ap_prep_net.empty()) {
        const WeightedNetwork prepared = prepare_network(net, weights, plan, inserted);
        save_network(prepared.net, ap_prep_net);
        if (!ap_prep_weights.empty()) save_weights(prepared.weights, ap_prep_weights);
      }
      std::cout << "layers: " << net.depth() << " -> " << merged.net.depth() << "\n";
      return kExitOk;
    }
    if (*cmd_verify) {
      WeightedNetwork original{read_network(vf_original), load_weights(vf_original_weights)};
      WeightedNetwork merged{read_network(vf_merged), load_weights(vf_merged_weights)};
      if (!vf_plan.empty()) {
        original = prepare_network(original.net, original.weights, load_plan(vf_plan), parse_activation(vf_act));
      }
      for (NetworkSpec* n : {&original.net, &merged.net}) {
        if (vf_height > 0) n->input_height = vf_height;
        if (vf_width > 0) n->input_width = vf_width;
      }
      const VerifyReport r = vf_f32 ? verify_equivalence<float>(original, merged, vf_trials, vf_seed)
                                    : verify_equivalence<double>(original, merged, vf_trials, vf_seed);
      const nlohmann::json doc = {{"element_type", r.single_precision ? "f32" : "f64"},
                                  {"trials", r.trials},
                                  {"max_abs_diff", r.max_abs_diff},
                                  {"max_rel_diff", r.max_rel_diff},
                                  {"threshold", r.single_precision ? r.rel_threshold : r.abs_threshold},
                                  {"passed", r.passed()}};
      std::cout << doc.dump(2) << "\n";
      return r.passed() ? kExitOk : kExitVerify;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
