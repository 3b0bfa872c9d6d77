// Copyright 2026 The graphrca Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// graphrca: build PDGs, run RCA on a scenario bundle, score reports and run
// scenario suites.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include "graphrca/builder/hammock_builder.hpp"
#include "graphrca/common/error.hpp"
#include "graphrca/common/json_util.hpp"
#include "graphrca/harness/harness.hpp"
#include "graphrca/orchestrator/orchestrator.hpp"
#include "graphrca/policy/backend.hpp"

namespace fs = std::filesystem;
using namespace graphrca;

namespace {

struct BackendOptions {
  std::string kind = "scripted";
  std::string remote_config;
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  int max_tokens = 2048;
};

void add_backend_options(CLI::App* cmd, BackendOptions& opts) {
  cmd->add_option("--backend", opts.kind, "scripted or remote")
      ->check(CLI::IsMember({"scripted", "remote"}));
  cmd->add_option("--remote-config", opts.remote_config,
                  "JSON file with endpoint, model, temperature, max_tokens, token_env");
  cmd->add_option("--endpoint", opts.endpoint, "chat-completion URL (remote)");
  cmd->add_option("--model", opts.model, "model name (remote)");
  cmd->add_option("--temperature", opts.temperature, "sampling temperature (remote)");
  cmd->add_option("--max-tokens", opts.max_tokens, "completion cap (remote)");
}

std::unique_ptr<PolicyBackend> make_backend(const BackendOptions& opts,
                                            const std::vector<fs::path>& bundles) {
  if (opts.kind == "scripted") return scripted_backend_for(bundles);
  RemoteConfig config;
  if (!opts.remote_config.empty()) {
    config = remote_config_from_json(parse_json(read_file(opts.remote_config), "remote config"));
  }
  if (!opts.endpoint.empty()) config.endpoint = opts.endpoint;
  if (!opts.model.empty()) config.model = opts.model;
  if (opts.temperature != 0.0) config.temperature = opts.temperature;
  if (opts.max_tokens != 2048) config.max_tokens = opts.max_tokens;
  if (config.endpoint.empty() || config.model.empty()) {
    throw PreconditionError("remote backend needs an endpoint and a model");
  }
  return std::make_unique<RemoteBackend>(config);
}

std::vector<std::int64_t> parse_seeds(const std::string& text) {
  std::vector<std::int64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoll(item));
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-guided root cause analysis for microservice incidents"};
  app.require_subcommand(1);

  // build-pdg
  auto* build = app.add_subcommand("build-pdg", "Build a service PDG from sources or facts");
  std::string src_dir, facts_dir, service, pdg_out;
  auto* src_opt = build->add_option("--src", src_dir, "directory of *.mini sources");
  build->add_option("--facts", facts_dir, "directory of program-facts JSON files")
      ->excludes(src_opt);
  build->add_option("--service", service, "service name")->required();
  build->add_option("--out", pdg_out, "output PDG JSON (stdout when omitted)");
  bool verbose = false;
  build->add_flag("--verbose", verbose, "list every unresolved call site");

  // run
  auto* run = app.add_subcommand("run", "Run RCA on one scenario bundle");
  std::string bundle_dir, report_out, markdown_out, trace_dir;
  std::int64_t seed = 0;
  RunConfig config;
  BackendOptions run_backend;
  run->add_option("--bundle", bundle_dir, "scenario bundle directory")->required();
  add_backend_options(run, run_backend);
  run->add_option("--seed", seed, "run seed");
  run->add_option("--max-blocks", config.budget.max_blocks, "traversal budget")
      ->check(CLI::PositiveNumber);
  run->add_option("--retry-limit", config.budget.retry_limit, "regenerations per query")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--log-cap", config.log_cap, "most recent log lines per entity")
      ->check(CLI::PositiveNumber);
  run->add_option("--candidates", config.candidates, "initial candidate cap")
      ->check(CLI::PositiveNumber);
  run->add_option("--suggestions", config.suggestions, "per-entity suggestion cap")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", report_out, "report JSON path")->required();
  run->add_option("--markdown", markdown_out, "report markdown path");
  run->add_option("--trace-dir", trace_dir, "write per-entity traversal traces here");

  // score
  auto* score = app.add_subcommand("score", "Score a report against ground truth");
  std::string score_report, score_truth;
  score->add_option("--report", score_report, "report JSON")->required();
  score->add_option("--truth", score_truth, "groundtruth.json")->required();

  // suite
  auto* suite = app.add_subcommand("suite", "Run every scenario under a directory");
  std::string scenarios_dir, seeds_text = "1,2,3,4,5", metrics_out, text_out;
  int workers = 1;
  bool serial = false;
  BackendOptions suite_backend;
  RunConfig suite_config;
  suite->add_option("--scenarios", scenarios_dir, "directory of bundles")->required();
  add_backend_options(suite, suite_backend);
  suite->add_option("--seeds", seeds_text, "comma-separated seeds");
  suite->add_option("--workers", workers, "parallel runs")->check(CLI::PositiveNumber);
  suite->add_option("--max-blocks", suite_config.budget.max_blocks, "traversal budget")
      ->check(CLI::PositiveNumber);
  suite->add_flag("--serial", serial, "use the sequential reference runner");
  suite->add_option("--out", metrics_out, "metrics JSON path")->required();
  suite->add_option("--text", text_out, "plain-text table path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      std::vector<std::string> diagnostics;
      Pdg pdg;
      if (!facts_dir.empty()) {
        pdg = build_pdg(load_facts_dir(facts_dir), service, &diagnostics);
      } else if (!src_dir.empty()) {
        pdg = build_service_pdg_from_sources(src_dir, service, &diagnostics);
      } else {
        throw PreconditionError("build-pdg needs --src or --facts");
      }
      if (verbose) {
        for (const auto& d : diagnostics) std::cerr << "note: " << d << "\n";
      } else if (!diagnostics.empty()) {
        std::cerr << "note: " << diagnostics.size()
                  << " call sites left unresolved (--verbose lists them)\n";
      }
      std::string doc = pdg_to_json(pdg);
      if (pdg_out.empty()) {
        std::cout << doc;
      } else {
        write_file(pdg_out, doc);
      }
      return 0;
    }
    if (*run) {
      config.seed = seed;
      if (!trace_dir.empty()) config.trace_dir = fs::path(trace_dir);
      ScenarioBundle bundle = ScenarioBundle::open(bundle_dir);
      auto backend = make_backend(run_backend, {fs::path(bundle_dir)});
      RcaReport report = run_rca(bundle, *backend, config);
      write_file(report_out, canonical_dump(report_to_json(report)));
      if (!markdown_out.empty()) write_file(markdown_out, report_to_markdown(report));
      std::cout << (report.inconclusive ? "inconclusive" : "root cause:");
      for (const auto& e : report.root_cause_entities) std::cout << " " << e.label();
      std::cout << "\n";
      return 0;
    }
    if (*score) {
      RcaReport report =
          report_from_json(parse_json(read_file(score_report), "report"));
      GroundTruth truth = load_ground_truth(score_truth);
      Json out{{"rci", score_rci(report, truth)}, {"rcr", score_rcr(report, truth)}};
      std::cout << out.dump() << "\n";
      return 0;
    }
    if (*suite) {
      auto scenarios = discover_scenarios(scenarios_dir);
      auto seeds = parse_seeds(seeds_text);
      auto backend = make_backend(suite_backend, scenarios);
      std::string name = fs::path(scenarios_dir).filename().string();
      SuiteMetrics metrics =
          serial ? run_suite_serial(scenarios, *backend, seeds, suite_config, name)
                 : run_suite(scenarios, *backend, seeds, suite_config, workers, name);
      write_file(metrics_out, canonical_dump(metrics_to_json(metrics)));
      if (text_out.empty()) {
        std::cout << metrics_to_text(metrics);
      } else {
        write_file(text_out, metrics_to_text(metrics));
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
