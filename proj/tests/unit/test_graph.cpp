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

#include <gtest/gtest.h>

#include <algorithm>
#include <deque>
#include <random>

#include "graphrca/builder/hammock_builder.hpp"
#include "graphrca/builder/mini_lang.hpp"
#include "graphrca/common/error.hpp"
#include "graphrca/graph/pdg.hpp"
#include "graphrca/graph/sdg.hpp"
#include "test_support.hpp"

namespace graphrca {
namespace {

EntityRef ms(const std::string& name) { return EntityRef{EntityKind::kMicroservice, name}; }

const char* kThreeNodeSdg = R"({
  "version": 1, "snapshot_time": 1700000000,
  "nodes": [{"kind": "microservice", "name": "frontend"},
            {"kind": "microservice", "name": "recommendation"},
            {"kind": "microservice", "name": "product-catalog"}],
  "edges": [{"from": {"kind": "microservice", "name": "frontend"},
             "to": {"kind": "microservice", "name": "recommendation"}},
            {"from": {"kind": "microservice", "name": "recommendation"},
             "to": {"kind": "microservice", "name": "product-catalog"}}],
  "pdg_attachments": {}
})";

TEST(SdgFromJson, ThreeServiceChain) {
  Sdg sdg = sdg_from_json(kThreeNodeSdg);
  EXPECT_EQ(sdg.nodes().size(), 3u);
  EXPECT_EQ(sdg.edges().size(), 2u);
  EXPECT_EQ(sdg.snapshot_time(), 1700000000);
}

TEST(SdgFromJson, EmptyGraph) {
  Sdg sdg = sdg_from_json(R"({"version": 1, "snapshot_time": 0, "nodes": [], "edges": [],
                              "pdg_attachments": {}})");
  EXPECT_TRUE(sdg.nodes().empty());
  EXPECT_TRUE(sdg.edges().empty());
}

TEST(SdgFromJson, UndeclaredEndpointNamesTheNode) {
  const char* doc = R"({"version": 1, "snapshot_time": 0,
    "nodes": [{"kind": "microservice", "name": "frontend"}],
    "edges": [{"from": {"kind": "microservice", "name": "frontend"},
               "to": {"kind": "microservice", "name": "cartX"}}],
    "pdg_attachments": {}})";
  try {
    sdg_from_json(doc);
    FAIL() << "expected SchemaViolation";
  } catch (const SchemaViolation& e) {
    EXPECT_NE(std::string(e.what()).find("cartX"), std::string::npos) << e.what();
  }
}

TEST(SdgFromJson, RejectsSyntaxAndInvariantBreaches) {
  EXPECT_THROW(sdg_from_json("{not json"), MalformedDocument);
  // A pod may not depend on anything.
  EXPECT_THROW(sdg_from_json(R"({"version": 1, "snapshot_time": 0,
    "nodes": [{"kind": "pod", "name": "p"}, {"kind": "microservice", "name": "m"}],
    "edges": [{"from": {"kind": "pod", "name": "p"}, "to": {"kind": "microservice", "name": "m"}}],
    "pdg_attachments": {}})"),
               SchemaViolation);
  // Attachments are for microservices only.
  EXPECT_THROW(sdg_from_json(R"({"version": 1, "snapshot_time": 0,
    "nodes": [{"kind": "configmap", "name": "cfg"}], "edges": [],
    "pdg_attachments": {"cfg": "src/cfg"}})"),
               SchemaViolation);
  EXPECT_THROW(sdg_from_json(R"({"version": 1, "snapshot_time": 0,
    "nodes": [{"kind": "microservice", "name": "a"}, {"kind": "microservice", "name": "a"}],
    "edges": [], "pdg_attachments": {}})"),
               SchemaViolation);
}

TEST(SdgDependees, FollowsEdgeDirection) {
  Sdg sdg = sdg_from_json(kThreeNodeSdg);
  EXPECT_EQ(sdg_dependees(sdg, ms("recommendation")),
            std::vector<EntityRef>{ms("product-catalog")});
  EXPECT_TRUE(sdg_dependees(sdg, ms("product-catalog")).empty());
  EXPECT_EQ(sdg.dependents(ms("recommendation")), std::vector<EntityRef>{ms("frontend")});
  EXPECT_THROW(sdg_dependees(sdg, ms("nope")), UnknownEntity);
}

Sdg random_sdg(std::mt19937_64& rng, int n, double density) {
  std::set<EntityRef> nodes;
  std::vector<EntityRef> list;
  for (int i = 0; i < n; ++i) {
    EntityKind kind = i % 7 == 6 ? EntityKind::kPod : EntityKind::kMicroservice;
    EntityRef e{kind, "svc" + std::to_string(i)};
    nodes.insert(e);
    list.push_back(e);
  }
  std::set<SdgEdge> edges;
  std::bernoulli_distribution coin(density);
  for (const auto& a : list) {
    if (a.kind != EntityKind::kMicroservice) continue;
    for (const auto& b : list) {
      if (coin(rng)) edges.insert(SdgEdge{a, b});
    }
  }
  return Sdg(nodes, edges, 0, {});
}

TEST(SdgDependees, MatchesLinearEdgeScan) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Sdg sdg = random_sdg(rng, 5, 0.4);
    for (const auto& node : sdg.nodes()) {
      std::vector<EntityRef> expected;
      for (const auto& edge : sdg.edges()) {
        if (edge.from == node) expected.push_back(edge.to);
      }
      std::sort(expected.begin(), expected.end());
      EXPECT_EQ(sdg_dependees(sdg, node), expected);
    }
  }
}

TEST(SdgDependees, ClosureEqualsDirectedReachability) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 10 + trial * 2;
    Sdg sdg = random_sdg(rng, n, 0.08);
    std::vector<EntityRef> nodes(sdg.nodes().begin(), sdg.nodes().end());
    std::map<EntityRef, int> index;
    for (int i = 0; i < n; ++i) index[nodes[i]] = i;
    // Warshall transitive closure over the raw edge set.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (const auto& e : sdg.edges()) reach[index[e.from]][index[e.to]] = true;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    for (int s = 0; s < n; ++s) {
      std::set<EntityRef> seen;
      std::deque<EntityRef> work{nodes[s]};
      while (!work.empty()) {
        EntityRef e = work.front();
        work.pop_front();
        for (const auto& d : sdg_dependees(sdg, e)) {
          if (seen.insert(d).second) work.push_back(d);
        }
      }
      std::set<EntityRef> expected;
      for (int j = 0; j < n; ++j) {
        if (reach[s][j]) expected.insert(nodes[j]);
      }
      EXPECT_EQ(seen, expected);
    }
  }
}

TEST(SdgJson, RoundTripIsStableAndCanonical) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Sdg sdg = random_sdg(rng, 12, 0.2);
    std::string bytes = sdg_to_json(sdg);
    Sdg back = sdg_from_json(bytes);
    EXPECT_TRUE(back == sdg);
    EXPECT_EQ(sdg_to_json(back), bytes);
  }
}

HammockBlock block(const std::string& id, Granularity g, BlockKind k, int start, int end,
                   std::optional<std::string> name = std::nullopt) {
  HammockBlock b;
  b.id = BlockId{id};
  b.granularity = g;
  b.kind = k;
  b.span = Span{"f.mini", start, end};
  b.code_text = k == BlockKind::kExp ? "x = 1;" : "fn f() { x = 1; }";
  b.name = std::move(name);
  return b;
}

Pdg two_block_pdg() {
  HammockBlock fn = block("f.mini:1-3#0", Granularity::kFunction, BlockKind::kFunctionDef, 1, 3,
                          "f");
  HammockBlock exp = block("f.mini:2-2#1", Granularity::kStatement, BlockKind::kExp, 2, 2);
  exp.string_literals = {"products_list"};
  std::map<BlockId, HammockBlock> blocks{{fn.id, fn}, {exp.id, exp}};
  std::set<PdgEdge> edges{PdgEdge{fn.id, exp.id, EdgeKind::kCtl, "entry"}};
  return Pdg("svc", blocks, edges, {{exp.id, fn.id}});
}

TEST(PdgJson, TwoBlockRoundTrip) {
  Pdg pdg = two_block_pdg();
  ASSERT_TRUE(pdg_validate(pdg).ok());
  std::string bytes = pdg_to_json(pdg);
  Pdg back = pdg_from_json(bytes);
  EXPECT_TRUE(back == pdg);
  EXPECT_EQ(pdg_to_json(back), bytes);
}

TEST(PdgJson, ContainmentCycleIsRejected) {
  Json doc = Json::parse(pdg_to_json(two_block_pdg()));
  doc["containment"] = Json::array({Json{{"child", "f.mini:2-2#1"}, {"parent", "f.mini:1-3#0"}},
                                    Json{{"child", "f.mini:1-3#0"}, {"parent", "f.mini:2-2#1"}}});
  try {
    pdg_from_json(doc.dump());
    FAIL() << "expected SchemaViolation";
  } catch (const SchemaViolation& e) {
    EXPECT_NE(std::string(e.what()).find("containment not a forest"), std::string::npos)
        << e.what();
  }
}

TEST(PdgJson, DanglingEdgeAndSyntaxErrors) {
  Json doc = Json::parse(pdg_to_json(two_block_pdg()));
  doc["adjacency"][0]["out"].push_back(Json{{"to", "f.mini:9-9#9"}, {"kind", "data"},
                                            {"label", "x"}});
  EXPECT_THROW(pdg_from_json(doc.dump()), SchemaViolation);
  EXPECT_THROW(pdg_from_json("[1, 2"), MalformedDocument);
}

TEST(PdgJson, OverlappingSiblingsAreRejected) {
  Pdg base = two_block_pdg();
  auto blocks = base.blocks();
  HammockBlock a = block("f.mini:1-9#0", Granularity::kFunction, BlockKind::kFunctionDef, 1, 9,
                         "f");
  HammockBlock b = block("f.mini:2-5#1", Granularity::kStatement, BlockKind::kBranch, 2, 5);
  HammockBlock c = block("f.mini:4-7#2", Granularity::kStatement, BlockKind::kLoop, 4, 7);
  Pdg pdg("svc", {{a.id, a}, {b.id, b}, {c.id, c}}, {}, {{b.id, a.id}, {c.id, a.id}});
  ValidationReport report = pdg_validate(pdg);
  EXPECT_TRUE(report.has("sibling_overlap"));
  EXPECT_THROW(pdg_from_json(pdg_to_json(pdg)), SchemaViolation);
}

TEST(PdgJson, CorpusPdgsReserializeByteIdentically) {
  for (const auto& entry : std::filesystem::directory_iterator(testing::source_dir() / "corpus")) {
    if (entry.path().extension() != ".mini") continue;
    ProgramFacts facts = parse_mini_source(read_file(entry.path()), entry.path().filename().string());
    Pdg pdg = build_pdg(facts, "corpus");
    std::string once = pdg_to_json(pdg);
    std::string twice = pdg_to_json(pdg_from_json(once));
    EXPECT_EQ(once, twice) << entry.path();
  }
}

TEST(PdgNeighbors, CallEdgeToGetProductList) {
  HammockBlock mod = block("f.mini:1-20#0", Granularity::kModule, BlockKind::kModule, 1, 20,
                           "f.mini");
  HammockBlock callee = block("f.mini:2-5#1", Granularity::kFunction, BlockKind::kFunctionDef, 2,
                              5, "get_product_list");
  HammockBlock caller = block("f.mini:7-12#2", Granularity::kFunction, BlockKind::kFunctionDef, 7,
                              12, "handler");
  HammockBlock site = block("f.mini:8-8#3", Granularity::kStatement, BlockKind::kExp, 8, 8);
  HammockBlock lonely = block("f.mini:14-15#4", Granularity::kFunction, BlockKind::kFunctionDef,
                              14, 15, "unused");
  PdgEdge call{site.id, callee.id, EdgeKind::kCall, "get_product_list"};
  Pdg pdg("svc", {{mod.id, mod}, {callee.id, callee}, {caller.id, caller}, {site.id, site},
                  {lonely.id, lonely}},
          {call},
          {{callee.id, mod.id}, {caller.id, mod.id}, {site.id, caller.id}, {lonely.id, mod.id}});
  ASSERT_TRUE(pdg_validate(pdg).ok());
  std::vector<Neighbor> n = pdg_neighbors(pdg, site.id, kAllEdgeKinds);
  ASSERT_EQ(n.size(), 1u);
  EXPECT_EQ(n[0].block.name, "get_product_list");
  EXPECT_EQ(n[0].edge, call);
  EXPECT_EQ(n[0].direction, Direction::kOut);
  EXPECT_TRUE(pdg_neighbors(pdg, site.id, {EdgeKind::kData}).empty());
  EXPECT_TRUE(pdg_neighbors(pdg, lonely.id, kAllEdgeKinds).empty());
  EXPECT_THROW(pdg_neighbors(pdg, BlockId{"missing"}, kAllEdgeKinds), UnknownBlock);
}

TEST(PdgNeighbors, MatchesBruteForceEdgeScanAndIsSymmetric) {
  std::mt19937_64 rng(21);
  const std::vector<EdgeKindSet> kind_sets{kAllEdgeKinds, {EdgeKind::kCtl}, {EdgeKind::kData},
                                           {EdgeKind::kCall, EdgeKind::kData}};
  for (int trial = 0; trial < 40; ++trial) {
    Pdg pdg = testing::synthetic_pdg(rng, 10);
    ASSERT_TRUE(pdg_validate(pdg).ok());
    for (const auto& kinds : kind_sets) {
      for (const auto& [id, b] : pdg.blocks()) {
        auto got = pdg_neighbors(pdg, id, kinds);
        std::vector<std::tuple<EdgeKind, Direction, BlockId, PdgEdge>> expected;
        for (const auto& e : pdg.edges()) {
          if (!kinds.contains(e.kind)) continue;
          if (e.from == id) expected.emplace_back(e.kind, Direction::kOut, e.to, e);
          if (e.to == id) expected.emplace_back(e.kind, Direction::kIn, e.from, e);
        }
        std::sort(expected.begin(), expected.end());
        ASSERT_EQ(got.size(), expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
          EXPECT_EQ(got[i].edge, std::get<3>(expected[i]));
          EXPECT_EQ(got[i].direction, std::get<1>(expected[i]));
          EXPECT_EQ(got[i].block.id, std::get<2>(expected[i]));
        }
        for (const auto& n : got) {
          Direction back = n.direction == Direction::kOut ? Direction::kIn : Direction::kOut;
          auto mirror = pdg_neighbors(pdg, n.block.id, kinds);
          EXPECT_TRUE(std::any_of(mirror.begin(), mirror.end(), [&](const Neighbor& m) {
            return m.block.id == id && m.direction == back && m.edge == n.edge;
          }));
        }
      }
    }
  }
}

TEST(PdgParent, ImmediateContainmentParent) {
  ProgramFacts facts = parse_mini_source(
      "fn f(items) {\n"
      "    while (i < len(items)) {\n"
      "        if (items[i]) {\n"
      "            emit(i);\n"
      "        }\n"
      "    }\n"
      "}\n",
      "n.mini");
  Pdg pdg = build_pdg(facts, "svc");
  std::optional<BlockId> fn, loop, branch, exp, mod;
  for (const auto& [id, b] : pdg.blocks()) {
    if (b.kind == BlockKind::kFunctionDef) fn = id;
    if (b.kind == BlockKind::kLoop) loop = id;
    if (b.kind == BlockKind::kBranch) branch = id;
    if (b.kind == BlockKind::kExp) exp = id;
    if (b.kind == BlockKind::kModule) mod = id;
  }
  ASSERT_TRUE(fn && loop && branch && exp && mod);
  EXPECT_EQ(pdg_parent(pdg, *branch)->id, *loop);
  EXPECT_EQ(pdg_parent(pdg, *exp)->id, *branch);
  EXPECT_EQ(pdg_parent(pdg, *loop)->id, *fn);
  EXPECT_FALSE(pdg_parent(pdg, *mod).has_value());
  EXPECT_EQ(pdg_parent(pdg, *exp)->id, pdg.containment().at(*exp));
  EXPECT_THROW(pdg_parent(pdg, BlockId{"missing"}), UnknownBlock);
}

TEST(PdgValidate, BuilderOutputIsClean) {
  ProgramFacts facts = parse_mini_source(
      read_file(testing::scenario_dir("positive", "schema-mismatch") / "src" / "recommendation" /
                "recommendation_server.mini"),
      "recommendation_server.mini");
  EXPECT_TRUE(pdg_validate(build_pdg(facts, "recommendation")).ok());
}

TEST(PdgValidate, ChildOutsideParentNamesBoth) {
  Pdg base = two_block_pdg();
  auto blocks = base.blocks();
  BlockId child{"f.mini:2-2#1"};
  blocks.at(child).span = Span{"f.mini", 5, 5};
  Pdg pdg("svc", blocks, base.edges(), base.containment());
  ValidationReport report = pdg_validate(pdg);
  ASSERT_EQ(report.violations.size(), 1u);
  const auto& subjects = report.violations[0].subjects;
  EXPECT_NE(std::find(subjects.begin(), subjects.end(), "f.mini:2-2#1"), subjects.end());
  EXPECT_NE(std::find(subjects.begin(), subjects.end(), "f.mini:1-3#0"), subjects.end());
}

TEST(PdgValidate, DroppedContainmentEntryIsFlagged) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    Pdg pdg = testing::random_pdg(rng);
    ASSERT_TRUE(pdg_validate(pdg).ok());
    auto containment = pdg.containment();
    ASSERT_FALSE(containment.empty());
    auto it = containment.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, containment.size() - 1)(rng));
    containment.erase(it);
    Pdg mutated(pdg.service(), pdg.blocks(), pdg.edges(), containment);
    EXPECT_FALSE(pdg_validate(mutated).ok());
  }
}

TEST(PdgValidate, CallSelfLoopAndExpGranularity) {
  Pdg base = two_block_pdg();
  auto edges = base.edges();
  BlockId fn{"f.mini:1-3#0"};
  edges.insert(PdgEdge{fn, fn, EdgeKind::kCall, "f"});
  EXPECT_FALSE(pdg_validate(Pdg("svc", base.blocks(), edges, base.containment())).ok());
  auto blocks = base.blocks();
  blocks.at(BlockId{"f.mini:2-2#1"}).code_text = "if (x) { y(); }";
  EXPECT_TRUE(pdg_validate(Pdg("svc", blocks, base.edges(), base.containment()))
                  .has("exp_branching"));
}

}  // namespace
}  // namespace graphrca
