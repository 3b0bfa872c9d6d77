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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "flow_oracle.hpp"
#include "graphrca/builder/hammock_builder.hpp"
#include "graphrca/builder/mini_lang.hpp"
#include "graphrca/harness/harness.hpp"
#include "graphrca/orchestrator/orchestrator.hpp"
#include "graphrca/traversal/traversal.hpp"
#include "random_program.hpp"
#include "test_support.hpp"

namespace graphrca {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and limits.
constexpr double kSeseSeconds = 10.0;
constexpr double kEndToEndSeconds = 30.0;
constexpr double kMttcTarget = 1474.5;
constexpr double kMttcTolerance = 0.5;
constexpr double kAtcTarget = 166470.0;
constexpr double kAtcTolerance = 50.0;
constexpr int kRoundTrips = 100;
constexpr int kMutations = 100;
constexpr int kFuzzRuns = 1000;
constexpr int kFuzzMaxBlocks = 30;
constexpr int kScoringPairs = 1000;
const std::vector<std::int64_t> kSeeds{1, 2, 3, 4, 5};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << "first failure: " << why << "; ";
    pass = false;
  }
  void check(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

EntityRef ms(const std::string& name) { return EntityRef{EntityKind::kMicroservice, name}; }

// --- SESE validity on the bundled corpus -----------------------------------

void sese_on_corpus(Outcome& out) {
  auto started = Clock::now();
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(testing::source_dir() / "corpus")) {
    if (entry.path().extension() == ".mini") files.push_back(entry.path());
  }
  std::size_t statements = 0;
  int checked = 0, failed = 0;
  for (const auto& path : files) {
    ProgramFacts facts = parse_mini_source(read_file(path), path.filename().string());
    for (const auto& r : facts.regions) statements += r.kind == RegionKind::kStatement;
    oracle::SeseResult r = oracle::check_sese(facts, extract_hammocks(facts));
    checked += r.checked;
    failed += static_cast<int>(r.failures.size());
    if (!r.failures.empty()) out.fail(path.filename().string() + ": " + r.failures.front());
  }
  double elapsed = seconds_since(started);
  out.check(files.size() >= 10, "fewer than 10 programs");
  out.check(statements >= 500, "fewer than 500 statements");
  out.check(checked > 0, "no blocks checked");
  out.check(elapsed < kSeseSeconds, "runtime over limit");
  out.detail << files.size() << " programs, " << statements << " statements, " << checked
             << " blocks, " << failed << " failing, " << elapsed << " s (limit " << kSeseSeconds
             << " s)";
}

// --- PDG serialization and containment mutations ---------------------------

// One random single-edit mutation of the containment map.
Pdg mutate_containment(const Pdg& pdg, int variant, std::mt19937_64& rng) {
  auto containment = pdg.containment();
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto it = containment.begin();
  std::advance(it, pick(containment.size()));
  const BlockId child = it->first;
  const BlockId parent = it->second;
  switch (variant) {
    case 0:  // drop an entry
      containment.erase(it);
      break;
    case 1:  // unknown parent
      it->second = BlockId{"ghost.mini:1-1#9999"};
      break;
    case 2:  // self-parent
      it->second = child;
      break;
    case 3:  // cycle: the parent now hangs below its own child
      containment[parent] = child;
      break;
    default: {  // reparent under a block whose span does not enclose the child
      const Span& cs = pdg.block(child).span;
      std::vector<BlockId> candidates;
      for (const auto& [id, b] : pdg.blocks()) {
        if (id == child) continue;
        if (!b.span.encloses(cs)) {
          candidates.push_back(id);
        }
      }
      it->second = candidates.empty() ? BlockId{"ghost.mini:1-1#9999"}
                                      : candidates[pick(candidates.size())];
      break;
    }
  }
  return Pdg(pdg.service(), pdg.blocks(), pdg.edges(), containment);
}

void pdg_serialization(Outcome& out) {
  std::mt19937_64 rng(2001);
  int identical = 0;
  for (int i = 0; i < kRoundTrips; ++i) {
    Pdg pdg = i % 2 == 0 ? testing::random_pdg(rng)
                         : testing::synthetic_pdg(rng, 5 + static_cast<int>(rng() % 60));
    if (!pdg_validate(pdg).ok()) {
      out.fail("generator produced an invalid PDG");
      continue;
    }
    const std::string first = pdg_to_json(pdg);
    Pdg back = pdg_from_json(first);
    bool same = back.blocks() == pdg.blocks() && back.edges() == pdg.edges() &&
                back.containment() == pdg.containment() && pdg_to_json(back) == first;
    identical += same;
    out.check(same, "round-trip " + std::to_string(i) + " differs");
  }
  int flagged = 0;
  for (int i = 0; i < kMutations; ++i) {
    Pdg pdg = testing::random_pdg(rng);
    Pdg mutated = mutate_containment(pdg, i % 5, rng);
    bool caught = !pdg_validate(mutated).ok();
    flagged += caught;
    out.check(caught, "mutation " + std::to_string(i) + " (variant " +
                          std::to_string(i % 5) + ") not flagged");
  }
  out.detail << identical << "/" << kRoundTrips << " byte-identical round-trips, " << flagged
             << "/" << kMutations << " mutations flagged";
}

// --- Traversal admissibility fuzz ------------------------------------------

class FuzzBackend : public PolicyBackend {
 public:
  explicit FuzzBackend(std::uint64_t seed) : rng_(seed) {}

  BackendReply complete(const BackendRequest& request) override {
    ++calls_;
    if (request.kind != QueryKind::kStep) return fallback_.complete(request);
    const Json& related = (*request.payload)["related"];
    auto step = [](const char* action, Json target) {
      return fence_payload(Json{{"action", action}, {"target", target}, {"insight", "fuzz"}});
    };
    BackendReply reply;
    switch (std::uniform_int_distribution<int>(0, 7)(rng_)) {
      case 0: reply.text = step("Expand", nullptr); break;
      case 1: reply.text = "not a structured reply"; break;
      case 2: reply.text = step("Complete", nullptr); break;
      case 3: reply.text = step("Discard", nullptr); break;
      case 4: reply.text = step("Relate", "no-such-block.mini:1-1#0"); break;
      case 5: reply.text = step("Jump", nullptr); break;
      default:
        if (related.empty()) {
          reply.text = step("Expand", nullptr);
        } else {
          std::size_t k = std::uniform_int_distribution<std::size_t>(0, related.size() - 1)(rng_);
          reply.text = step("Relate", related[k]["block"]["id"]);
        }
    }
    reply.usage.completion_tokens = estimate_tokens(reply.text);
    return reply;
  }
  std::string name() const override { return "fuzz"; }
  bool simulated_clock() const override { return true; }

  int calls() const { return calls_; }

 private:
  std::mt19937_64 rng_;
  ScriptedBackend fallback_;
  int calls_ = 0;
};

void traversal_fuzz(Outcome& out) {
  std::mt19937_64 rng(3001);
  int violations = 0, over_bound = 0, max_blocks_seen = 0;
  for (int i = 0; i < kFuzzRuns; ++i) {
    Pdg pdg = testing::random_pdg(rng, kFuzzMaxBlocks);
    max_blocks_seen = std::max(max_blocks_seen, static_cast<int>(pdg.blocks().size()));
    TraversalBudget budget{std::uniform_int_distribution<int>(1, 15)(rng),
                           std::uniform_int_distribution<int>(0, 3)(rng)};
    FuzzBackend backend(rng());
    Policy policy(backend, "fuzz", budget.retry_limit);
    ObservabilityContext ctx;
    ctx.entity = ms("svc");
    TraversalOutcome t = run_traversal(policy, pdg, ctx, budget);
    if (first_inadmissible_step(pdg, t.history).has_value() ||
        static_cast<int>(t.history.records.size()) > budget.max_blocks) {
      ++violations;
      out.fail("run " + std::to_string(i) + " has an inadmissible history");
    }
    if (backend.calls() > traversal_call_bound(budget)) {
      ++over_bound;
      out.fail("run " + std::to_string(i) + " made " + std::to_string(backend.calls()) +
               " calls, bound " + std::to_string(traversal_call_bound(budget)));
    }
  }
  out.check(max_blocks_seen <= kFuzzMaxBlocks, "PDG above block limit");
  out.detail << kFuzzRuns << " runs (largest PDG " << max_blocks_seen << " blocks), "
             << violations << " inadmissible, " << over_bound << " over call bound";
}

// --- End-to-end fixtures -----------------------------------------------------

JudgmentLabel label_of(const RcaReport& r, const std::string& name) {
  auto it = r.per_entity.find(ms(name));
  return it == r.per_entity.end() ? JudgmentLabel::kUnrelated : it->second.label;
}

std::vector<std::string> primaries(const RcaReport& r) {
  std::vector<std::string> out;
  for (const auto& [e, v] : r.per_entity) {
    if (v.label == JudgmentLabel::kPrimaryFailure) out.push_back(e.label());
  }
  return out;
}

void end_to_end(Outcome& out) {
  auto started = Clock::now();
  const auto silent = testing::scenario_dir("positive", "silent-retry");
  const auto schema = testing::scenario_dir("positive", "schema-mismatch");
  auto backend = scripted_backend_for({silent, schema});
  ScenarioBundle silent_bundle = ScenarioBundle::open(silent);
  ScenarioBundle schema_bundle = ScenarioBundle::open(schema);
  int silent_ok = 0, schema_ok = 0, identical = 0;
  for (std::int64_t seed : kSeeds) {
    RunConfig cfg;
    cfg.seed = seed;

    RcaReport a = run_rca(silent_bundle, *backend, cfg);
    bool ok = primaries(a) == std::vector<std::string>{ms("external-product-db").label()} &&
              a.root_cause_entities == std::vector<EntityRef>{ms("external-product-db")} &&
              label_of(a, "recommendation") == JudgmentLabel::kSymptomOnly;
    silent_ok += ok;
    out.check(ok, "silent-retry seed " + std::to_string(seed));

    RcaReport b = run_rca(schema_bundle, *backend, cfg);
    ok = label_of(b, "recommendation") == JudgmentLabel::kPrimaryFailure &&
         label_of(b, "frontend") == JudgmentLabel::kSymptomOnly &&
         label_of(b, "frontend-proxy") == JudgmentLabel::kSymptomOnly &&
         b.per_entity.contains(ms("product-catalog")) &&
         label_of(b, "product-catalog") == JudgmentLabel::kUnrelated &&
         primaries(b).size() == 1;
    schema_ok += ok;
    out.check(ok, "schema-mismatch seed " + std::to_string(seed));

    bool same = canonical_dump(report_to_json(run_rca(silent_bundle, *backend, cfg))) ==
                    canonical_dump(report_to_json(a)) &&
                canonical_dump(report_to_json(run_rca(schema_bundle, *backend, cfg))) ==
                    canonical_dump(report_to_json(b));
    identical += same;
    out.check(same, "repeat run differs for seed " + std::to_string(seed));
  }
  double elapsed = seconds_since(started);
  out.check(elapsed < kEndToEndSeconds, "runtime over limit");
  out.detail << "silent-retry " << silent_ok << "/5, schema-mismatch " << schema_ok
             << "/5, byte-identical repeats " << identical << "/5, " << elapsed << " s (limit "
             << kEndToEndSeconds << " s)";
}

// --- Metric normalization ----------------------------------------------------

void table4_normalization(Outcome& out) {
  auto mttc = normalize_metric(907.43, 0.6154);
  auto atc = normalize_metric(102440.0, 0.6154);
  out.check(mttc && std::abs(*mttc - kMttcTarget) <= kMttcTolerance, "eff. MTTC off target");
  out.check(atc && std::abs(*atc - kAtcTarget) <= kAtcTolerance, "eff. ATC off target");
  out.check(!normalize_metric(1.0, 0.0).has_value(), "zero RCR not undefined");
  out.detail << "907.43/0.6154 = " << (mttc ? *mttc : -1) << " (want " << kMttcTarget << " +- "
             << kMttcTolerance << "), 102440/0.6154 = " << (atc ? *atc : -1) << " (want "
             << kAtcTarget << " +- " << kAtcTolerance << ")";
}

// --- Scoring rules -----------------------------------------------------------

RcaReport report_with(const std::vector<EntityRef>& roots, const std::string& reasoning,
                      const std::vector<std::string>& evidence) {
  RcaReport r;
  r.root_cause_entities = roots;
  r.root_cause_reasoning = reasoning;
  for (const auto& e : roots) {
    r.per_entity[e] = EntityVerdict{JudgmentLabel::kPrimaryFailure, reasoning, evidence};
  }
  r.inconclusive = roots.empty();
  return r;
}

void scoring_rules(Outcome& out) {
  std::mt19937_64 rng(4001);
  const std::vector<std::string> pool{"a", "b", "c", "d"};
  const std::vector<std::string> words{"retry", "schema", "limit", "flag", "label", "volume"};
  auto subset = [&](const std::vector<std::string>& from, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<std::string> picked;
    for (const auto& w : from) {
      if (coin(rng)) picked.push_back(w);
    }
    return picked;
  };
  int rcr_hits = 0, implication_breaks = 0;
  for (int i = 0; i < kScoringPairs; ++i) {
    GroundTruth t;
    for (const auto& n : subset(pool, 0.4)) t.root_cause_entities.push_back(ms(n));
    if (t.root_cause_entities.empty()) t.root_cause_entities.push_back(ms("a"));
    for (const auto& w : subset(words, 0.3)) t.reasoning_keywords.push_back({w});
    t.fault_site_identifiers = subset(words, 0.5);
    std::vector<EntityRef> roots;
    for (const auto& n : subset(pool, 0.5)) roots.push_back(ms(n));
    std::string reasoning;
    for (const auto& w : subset(words, 0.6)) reasoning += w + " ";
    RcaReport r = report_with(roots, reasoning, subset(words, 0.5));
    int rcr = score_rcr(r, t);
    rcr_hits += rcr;
    if (rcr == 1 && score_rci(r, t) != 1) ++implication_breaks;
  }
  out.check(implication_breaks == 0, "rcr=1 with rci=0");
  out.check(rcr_hits > 0, "sample never scored rcr=1");

  GroundTruth truth;
  truth.root_cause_entities = {ms("a"), ms("b")};
  struct Case {
    std::vector<EntityRef> roots;
    int want;
  };
  const std::vector<Case> cases{{{ms("a"), ms("b")}, 1},
                                {{ms("b"), ms("a")}, 1},
                                {{ms("a")}, 0},
                                {{ms("a"), ms("b"), ms("c")}, 0},
                                {{}, 0},
                                {{ms("a"), EntityRef{EntityKind::kPod, "b"}}, 0}};
  int rci_ok = 0;
  for (const auto& c : cases) rci_ok += score_rci(report_with(c.roots, "", {}), truth) == c.want;
  out.check(rci_ok == static_cast<int>(cases.size()), "hand-built RCI case mismatch");
  out.detail << kScoringPairs << " random pairs, " << rcr_hits << " with rcr=1, "
             << implication_breaks << " implication breaks; " << rci_ok << "/" << cases.size()
             << " hand-built RCI cases";
}

// --- Scripted suite ----------------------------------------------------------

void scripted_suite(Outcome& out) {
  auto positive = discover_scenarios(testing::source_dir() / "scenarios" / "positive");
  auto backend = scripted_backend_for(positive);
  SuiteMetrics m = run_suite(positive, *backend, kSeeds, RunConfig{}, 4, "positive");
  out.check(positive.size() == 6, "expected 6 positive scenarios");
  out.check(m.rci == 1.0 && m.rcr == 1.0, "scripted suite below 1.0");

  testing::TempDir tmp("acceptance-broken");
  const std::string broken = "constant-misconfiguration";
  testing::copy_suite_with_broken_rule(tmp.path() / "suite", broken);
  auto mutated = discover_scenarios(tmp.path() / "suite");
  auto mutated_backend = scripted_backend_for(mutated);
  SuiteMetrics b = run_suite(mutated, *mutated_backend, kSeeds, RunConfig{}, 4, "broken");
  std::vector<std::string> below;
  for (const auto& s : b.per_scenario) {
    if (s.rcr < 1.0) below.push_back(s.scenario_id);
  }
  out.check(b.rcr < 1.0, "broken rule not detected");
  out.check(below == std::vector<std::string>{broken}, "broken scenario not identified");
  out.detail << m.runs << " runs: rci " << m.rci << ", rcr " << m.rcr << "; broken " << broken
             << ": suite rcr " << b.rcr << ", flagged "
             << (below.empty() ? std::string("none") : below.front());
}

// --- Remote backend smoke test -----------------------------------------------

// Chat-completion stub. It recovers the query from the prompt text alone and
// answers with the scenario's scripted replies.
class StubServer {
 public:
  explicit StubServer(const fs::path& bundle) {
    scenario_id_ = ScenarioBundle::open(bundle).id();
    scripted_.add_bundle(bundle, scenario_id_);
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                  httplib::Response& res) { handle(req, res); });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  int port() const { return port_; }
  std::int64_t tokens() const {
    std::lock_guard lock(mu_);
    return tokens_;
  }
  int requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }
  int bad_auth() const {
    std::lock_guard lock(mu_);
    return bad_auth_;
  }
  int unparsed() const {
    std::lock_guard lock(mu_);
    return unparsed_;
  }
  std::string first_unparsed() const {
    std::lock_guard lock(mu_);
    return first_unparsed_;
  }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    Json body = Json::parse(req.body);
    BackendRequest q;
    q.system_prompt = body["messages"][0]["content"].get<std::string>();
    q.prompt = body["messages"][1]["content"].get<std::string>();
    const std::string first = q.prompt.substr(0, q.prompt.find('\n'));
    static const std::vector<std::pair<std::string, QueryKind>> phrases{
        {"choose the entities", QueryKind::kSelect},
        {"find the code block", QueryKind::kMatch},
        {"traversal step", QueryKind::kStep},
        {"summarize what the code traversal found", QueryKind::kSynthesize},
        {"decide its role", QueryKind::kJudge},
        {"name further entities", QueryKind::kSuggest},
        {"write the final root cause report", QueryKind::kSummary}};
    bool known = false;
    for (const auto& [phrase, kind] : phrases) {
      if (first.find(phrase) != std::string::npos) {
        q.kind = kind;
        known = true;
        break;
      }
    }
    std::smatch m;
    static const std::regex step_re(R"(^Entity (.+), traversal step (-?\d+), focal block (.+)\.$)");
    static const std::regex entity_re(R"(^Entity ([^:]+):)");
    static const std::regex incident_re(R"(^Incident ([^:]+):)");
    if (std::regex_match(first, m, step_re)) {
      q.entity = m[1];
      q.step = std::stoi(m[2]);
      q.block = m[3];
    } else if (std::regex_search(first, m, entity_re)) {
      q.entity = m[1];
    }
    std::smatch sm;
    if (std::regex_search(first, sm, incident_re)) q.scenario_id = sm[1];
    q.attempt = q.prompt.find("Your previous reply was rejected") == std::string::npos ? 0 : 1;

    Json payload = Json::object();
    const std::string marker = "Input:\n";
    if (auto at = q.prompt.find(marker); at != std::string::npos) {
      // The payload is pretty-printed; its closing brace is the first one in column 0.
      std::size_t begin = at + marker.size();
      std::size_t end = q.prompt.find("\n}", begin);
      if (end != std::string::npos) {
        payload = Json::parse(q.prompt.substr(begin, end + 2 - begin), nullptr, false);
      }
    }
    if (!known || payload.is_discarded()) {
      std::lock_guard lock(mu_);
      ++unparsed_;
      if (first_unparsed_.empty()) first_unparsed_ = first;
      res.status = 400;
      return;
    }
    q.payload = &payload;
    if (q.scenario_id.empty()) q.scenario_id = scenario_id_;
    BackendReply reply = scripted_.complete(q);

    Json doc{{"choices", Json::array({Json{{"message", {{"role", "assistant"}, {"content", reply.text}}}}})},
             {"usage",
              {{"prompt_tokens", reply.usage.prompt_tokens},
               {"completion_tokens", reply.usage.completion_tokens}}}};
    {
      std::lock_guard lock(mu_);
      ++requests_;
      tokens_ += reply.usage.total();
      if (req.get_header_value("Authorization") != "Bearer acceptance-token") ++bad_auth_;
    }
    res.set_content(doc.dump(), "application/json");
  }

  httplib::Server server_;
  ScriptedBackend scripted_;
  std::string scenario_id_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::int64_t tokens_ = 0;
  int requests_ = 0;
  int bad_auth_ = 0;
  int unparsed_ = 0;
  std::string first_unparsed_;
};

void remote_smoke(Outcome& out) {
  const auto bundle_dir = testing::scenario_dir("positive", "schema-mismatch");
  ::setenv("GRAPHRCA_API_TOKEN", "acceptance-token", 1);
  StubServer stub(bundle_dir);
  RemoteConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(stub.port()) + "/v1/chat/completions";
  cfg.model = "stub-model";
  cfg.timeout_s = 10;
  RemoteBackend remote(cfg);
  ScenarioBundle bundle = ScenarioBundle::open(bundle_dir);
  RcaReport r;
  try {
    r = run_rca(bundle, remote, RunConfig{});
  } catch (const std::exception& e) {
    out.fail(std::string(e.what()) + " (stub could not parse '" + stub.first_unparsed() + "')");
    return;
  }
  GroundTruth truth = load_ground_truth(bundle_dir / "groundtruth.json");
  const std::int64_t recorded = r.metadata.prompt_tokens + r.metadata.completion_tokens;
  out.check(stub.requests() > 0, "no requests reached the stub");
  out.check(stub.unparsed() == 0, "stub could not parse a prompt");
  out.check(recorded > 0 && recorded == stub.tokens(), "token totals differ from the stub");
  out.check(r.metadata.calls == stub.requests(), "call count differs from the stub");
  out.check(stub.bad_auth() == 0, "bearer token missing");
  out.check(r.metadata.backend == "remote:stub-model", "backend name not recorded");
  out.check(score_rci(r, truth) == 1 && score_rcr(r, truth) == 1, "remote run scored below 1");
  out.detail << stub.requests() << " requests, " << recorded << " tokens recorded vs "
             << stub.tokens() << " served, rci " << score_rci(r, truth) << ", rcr "
             << score_rcr(r, truth);
}

struct Criterion {
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace
}  // namespace graphrca

int main() {
  using namespace graphrca;
  const std::vector<Criterion> criteria{
      {"sese-validity", sese_on_corpus},
      {"pdg-serialization", pdg_serialization},
      {"traversal-admissibility", traversal_fuzz},
      {"end-to-end-fixtures", end_to_end},
      {"metric-normalization", table4_normalization},
      {"scoring-rules", scoring_rules},
      {"scripted-suite", scripted_suite},
      {"remote-smoke", remote_smoke},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    failures += !out.pass;
    std::cout << (out.pass ? "PASS " : "FAIL ") << c.name << ": " << out.detail.str()
              << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
