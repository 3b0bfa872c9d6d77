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

#include "graphrca/builder/hammock_builder.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <functional>

#include "graphrca/builder/mini_lang.hpp"
#include "graphrca/common/error.hpp"

namespace graphrca {
namespace {

bool is_scope(RegionKind kind) {
  return kind == RegionKind::kModule || kind == RegionKind::kClass ||
         kind == RegionKind::kFunction;
}

bool allowed_child(RegionKind parent, RegionKind child) {
  switch (parent) {
    case RegionKind::kModule:
      return child != RegionKind::kModule;
    case RegionKind::kClass:
      return child == RegionKind::kFunction;
    case RegionKind::kFunction:
    case RegionKind::kBranch:
    case RegionKind::kLoop:
    case RegionKind::kTry:
      return !is_scope(child);
    case RegionKind::kStatement:
      return false;
  }
  return false;
}

bool allowed_arm(RegionKind parent, Arm arm) {
  switch (parent) {
    case RegionKind::kBranch:
      return arm == Arm::kThen || arm == Arm::kElse || arm == Arm::kNone;
    case RegionKind::kLoop:
      return arm == Arm::kBody || arm == Arm::kNone;
    case RegionKind::kTry:
      return arm == Arm::kBody || arm == Arm::kCatch || arm == Arm::kNone;
    default:
      return arm == Arm::kNone;
  }
}

// Unlabelled children of control regions take the primary arm.
Arm effective_arm(RegionKind parent, Arm arm) {
  if (arm != Arm::kNone) return arm;
  switch (parent) {
    case RegionKind::kBranch:
      return Arm::kThen;
    case RegionKind::kLoop:
    case RegionKind::kTry:
      return Arm::kBody;
    default:
      return Arm::kNone;
  }
}

struct RegionTree {
  const ProgramFacts* facts = nullptr;
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::vector<std::size_t>> children;
  std::size_t root = 0;

  const Region& at(std::size_t i) const { return facts->regions[i]; }
  const std::vector<std::size_t>& kids(const Region& r) const {
    static const std::vector<std::size_t> kEmpty;
    auto it = children.find(r.region_id);
    return it == children.end() ? kEmpty : it->second;
  }
};

RegionTree make_tree(const ProgramFacts& facts) {
  check_facts(facts);
  RegionTree tree;
  tree.facts = &facts;
  for (std::size_t i = 0; i < facts.regions.size(); ++i) {
    const Region& r = facts.regions[i];
    tree.index[r.region_id] = i;
    if (r.parent_region_id) {
      tree.children[*r.parent_region_id].push_back(i);
    } else {
      tree.root = i;
    }
  }
  return tree;
}

std::string block_id_for(const std::string& file, int start, int end,
                         int ordinal) {
  return file + ":" + std::to_string(start) + "-" + std::to_string(end) + "#" +
         std::to_string(ordinal);
}

void append_unique(std::vector<std::string>& list,
                   const std::vector<std::string>& items) {
  for (const auto& item : items) {
    if (std::find(list.begin(), list.end(), item) == list.end()) {
      list.push_back(item);
    }
  }
}

class Extractor {
 public:
  Extractor(const ProgramFacts& facts, Hammocks& out)
      : facts_(facts), tree_(make_tree(facts)), out_(out) {}

  void run() { emit_region(tree_.root, std::nullopt, Arm::kNone); }

 private:
  const ProgramFacts& facts_;
  RegionTree tree_;
  Hammocks& out_;
  int ordinal_ = 0;

  BlockId add_block(HammockBlock block, const std::optional<BlockId>& parent,
                    std::vector<std::string> members, Arm arm) {
    BlockId id = block.id;
    out_.arm_of[id] = arm;
    for (const auto& m : members) out_.block_of_region[facts_.file][m] = id;
    out_.members[id] = std::move(members);
    if (parent) out_.containment[id] = *parent;
    out_.blocks.emplace(id, std::move(block));
    return id;
  }

  void emit_region(std::size_t index, const std::optional<BlockId>& parent,
                   Arm arm) {
    const Region& r = tree_.at(index);
    HammockBlock block;
    block.span = Span{facts_.file, r.start, r.end};
    block.code_text = r.text;
    block.string_literals = r.string_literals;
    switch (r.kind) {
      case RegionKind::kModule:
        block.granularity = Granularity::kModule;
        block.kind = BlockKind::kModule;
        block.name = r.name ? *r.name : facts_.file;
        break;
      case RegionKind::kClass:
        block.granularity = Granularity::kClass;
        block.kind = BlockKind::kClassDef;
        block.name = r.name;
        break;
      case RegionKind::kFunction:
        block.granularity = Granularity::kFunction;
        block.kind = BlockKind::kFunctionDef;
        block.name = r.name;
        break;
      case RegionKind::kBranch:
        block.granularity = Granularity::kStatement;
        block.kind = BlockKind::kBranch;
        break;
      case RegionKind::kLoop:
        block.granularity = Granularity::kStatement;
        block.kind = BlockKind::kLoop;
        break;
      case RegionKind::kTry:
        block.granularity = Granularity::kStatement;
        block.kind = BlockKind::kTry;
        break;
      case RegionKind::kStatement:
        throw InconsistentFacts("statement regions are emitted in runs");
    }
    block.id = BlockId{block_id_for(facts_.file, r.start, r.end, ordinal_++)};
    BlockId id = add_block(std::move(block), parent, {r.region_id}, arm);
    emit_children(r, id);
  }

  void emit_children(const Region& r, const BlockId& id) {
    const auto& kids = tree_.kids(r);
    std::vector<std::size_t> run;
    Arm run_arm = Arm::kNone;
    auto flush = [&]() {
      if (run.empty()) return;
      const Region& first = tree_.at(run.front());
      const Region& last = tree_.at(run.back());
      HammockBlock exp;
      exp.granularity = Granularity::kStatement;
      exp.kind = BlockKind::kExp;
      exp.span = Span{facts_.file, first.start, last.end};
      std::vector<std::string> members;
      for (std::size_t i : run) {
        const Region& s = tree_.at(i);
        if (!exp.code_text.empty()) exp.code_text += "\n";
        exp.code_text += s.text;
        append_unique(exp.string_literals, s.string_literals);
        members.push_back(s.region_id);
      }
      exp.id = BlockId{block_id_for(facts_.file, exp.span.start, exp.span.end,
                                    ordinal_++)};
      add_block(std::move(exp), id, std::move(members), run_arm);
      run.clear();
    };
    for (std::size_t k : kids) {
      const Region& child = tree_.at(k);
      Arm arm = effective_arm(r.kind, child.arm);
      if (child.kind == RegionKind::kStatement) {
        if (!run.empty() && arm != run_arm) flush();
        run_arm = arm;
        run.push_back(k);
      } else {
        flush();
        emit_region(k, id, arm);
      }
    }
    flush();
  }
};

// ---------------------------------------------------------------------------
// Statement-level flow graph used for reaching definitions.

struct FlowNode {
  BlockId owner;
  std::vector<std::string> defs;
  std::vector<std::string> uses;
  std::vector<std::string> calls;
  std::vector<int> succ;
};

struct Procedure {
  BlockId block;  // function or module block
  bool is_module = false;
  std::vector<FlowNode> nodes;
  int entry = 0;
  int exit = 0;
};

class FlowBuilder {
 public:
  FlowBuilder(const RegionTree& tree, const Hammocks& hammocks,
              const std::string& file)
      : tree_(tree), hammocks_(hammocks), file_(file) {}

  Procedure build(const Region& scope) {
    Procedure proc;
    proc.block = owner_of(scope);
    proc.is_module = scope.kind == RegionKind::kModule;
    proc_ = &proc;
    proc.entry = add_node(proc.block, scope.kind == RegionKind::kFunction
                                          ? scope.defs
                                          : std::vector<std::string>{},
                          {}, {});
    std::vector<std::size_t> body;
    for (std::size_t k : tree_.kids(scope)) {
      if (!is_scope(tree_.at(k).kind)) body.push_back(k);
    }
    int last = sequence(body, proc.entry);
    proc.exit = add_node(proc.block, {}, {}, {});
    link(last, proc.exit);
    proc_ = nullptr;
    return proc;
  }

 private:
  const RegionTree& tree_;
  const Hammocks& hammocks_;
  const std::string& file_;
  Procedure* proc_ = nullptr;

  BlockId owner_of(const Region& r) const {
    return hammocks_.block_of_region.at(file_).at(r.region_id);
  }

  int add_node(const BlockId& owner, std::vector<std::string> defs,
               std::vector<std::string> uses, std::vector<std::string> calls) {
    proc_->nodes.push_back(FlowNode{owner, std::move(defs), std::move(uses),
                                    std::move(calls), {}});
    return static_cast<int>(proc_->nodes.size()) - 1;
  }
  void link(int from, int to) { proc_->nodes[from].succ.push_back(to); }

  int sequence(const std::vector<std::size_t>& regions, int pred) {
    for (std::size_t k : regions) pred = construct(tree_.at(k), pred);
    return pred;
  }

  std::vector<std::size_t> arm_children(const Region& r, Arm arm) const {
    std::vector<std::size_t> out;
    for (std::size_t k : tree_.kids(r)) {
      if (effective_arm(r.kind, tree_.at(k).arm) == arm) out.push_back(k);
    }
    return out;
  }

  int construct(const Region& r, int pred) {
    BlockId owner = owner_of(r);
    switch (r.kind) {
      case RegionKind::kStatement: {
        int n = add_node(owner, r.defs, r.uses, r.calls);
        link(pred, n);
        return n;
      }
      case RegionKind::kBranch: {
        int header = add_node(owner, r.defs, r.uses, r.calls);
        link(pred, header);
        int then_end = sequence(arm_children(r, Arm::kThen), header);
        int else_end = sequence(arm_children(r, Arm::kElse), header);
        int join = add_node(owner, {}, {}, {});
        link(then_end, join);
        if (else_end != then_end) link(else_end, join);
        return join;
      }
      case RegionKind::kLoop: {
        int header = add_node(owner, r.defs, r.uses, r.calls);
        link(pred, header);
        int body_end = sequence(arm_children(r, Arm::kBody), header);
        link(body_end, header);
        return header;
      }
      case RegionKind::kTry: {
        int header = add_node(owner, r.defs, r.uses, r.calls);
        link(pred, header);
        int body_end = sequence(arm_children(r, Arm::kBody), header);
        int catch_end = sequence(arm_children(r, Arm::kCatch), header);
        int join = add_node(owner, {}, {}, {});
        link(body_end, join);
        if (catch_end != body_end) link(catch_end, join);
        return join;
      }
      default:
        throw InconsistentFacts("scope region nested in a statement context");
    }
  }
};

struct Definition {
  int node;
  std::string var;
};

// Returns IN sets as definition indices per node.
std::vector<std::vector<bool>> reaching_definitions(
    const Procedure& proc, std::vector<Definition>& defs) {
  const int n = static_cast<int>(proc.nodes.size());
  std::vector<std::vector<int>> defs_at(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& v : proc.nodes[i].defs) {
      defs_at[i].push_back(static_cast<int>(defs.size()));
      defs.push_back(Definition{i, v});
    }
  }
  const std::size_t d = defs.size();
  std::vector<std::vector<int>> preds(n);
  for (int i = 0; i < n; ++i) {
    for (int s : proc.nodes[i].succ) preds[s].push_back(i);
  }
  std::vector<std::vector<bool>> in(n, std::vector<bool>(d, false));
  std::vector<std::vector<bool>> out(n, std::vector<bool>(d, false));
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      std::vector<bool> next_in(d, false);
      for (int p : preds[i]) {
        for (std::size_t k = 0; k < d; ++k) {
          if (out[p][k]) next_in[k] = true;
        }
      }
      std::vector<bool> next_out = next_in;
      const auto& node_defs = proc.nodes[i].defs;
      if (!node_defs.empty()) {
        for (std::size_t k = 0; k < d; ++k) {
          if (next_out[k] &&
              std::find(node_defs.begin(), node_defs.end(), defs[k].var) !=
                  node_defs.end()) {
            next_out[k] = false;
          }
        }
        for (int k : defs_at[i]) next_out[static_cast<std::size_t>(k)] = true;
      }
      if (next_in != in[i] || next_out != out[i]) {
        in[i] = std::move(next_in);
        out[i] = std::move(next_out);
        changed = true;
      }
    }
  }
  return in;
}

std::string last_segment(const std::string& name) {
  auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(dot + 1);
}

}  // namespace

void check_facts(const ProgramFacts& facts) {
  if (facts.regions.empty()) throw InconsistentFacts(facts.file + ": no regions");
  std::map<std::string, std::size_t> index;
  int modules = 0;
  for (std::size_t i = 0; i < facts.regions.size(); ++i) {
    const Region& r = facts.regions[i];
    if (r.region_id.empty()) throw InconsistentFacts(facts.file + ": empty region id");
    if (!index.emplace(r.region_id, i).second) {
      throw InconsistentFacts(facts.file + ": duplicate region id " + r.region_id);
    }
    if (r.start > r.end) {
      throw InconsistentFacts(facts.file + ": region " + r.region_id +
                              " ends before it starts");
    }
    if (r.kind == RegionKind::kModule) {
      ++modules;
      if (r.parent_region_id) {
        throw InconsistentFacts(facts.file + ": module region has a parent");
      }
      if (i != 0) {
        throw InconsistentFacts(facts.file + ": module region must come first");
      }
      continue;
    }
    if (!r.parent_region_id) {
      throw InconsistentFacts(facts.file + ": region " + r.region_id +
                              " has no parent");
    }
    // Pre-order listing means parents precede children, which also rules
    // out cycles.
    auto p = index.find(*r.parent_region_id);
    if (p == index.end()) {
      throw InconsistentFacts(facts.file + ": region " + r.region_id +
                              " has unknown or later parent " +
                              *r.parent_region_id);
    }
    const Region& parent = facts.regions[p->second];
    if (!allowed_child(parent.kind, r.kind)) {
      throw InconsistentFacts(facts.file + ": " + std::string(to_string(r.kind)) +
                              " region " + r.region_id + " cannot nest in " +
                              std::string(to_string(parent.kind)) + " region " +
                              parent.region_id);
    }
    if (!allowed_arm(parent.kind, r.arm)) {
      throw InconsistentFacts(facts.file + ": region " + r.region_id +
                              " has arm '" + std::string(to_string(r.arm)) +
                              "' invalid for its parent");
    }
    if (r.start < parent.start || r.end > parent.end) {
      throw InconsistentFacts(facts.file + ": region " + r.region_id +
                              " is not nested inside parent " +
                              parent.region_id);
    }
  }
  if (modules != 1) {
    throw InconsistentFacts(facts.file + ": expected exactly one module region");
  }
}

Hammocks extract_hammocks(const ProgramFacts& facts) {
  Hammocks out;
  Extractor(facts, out).run();
  return out;
}

Hammocks extract_hammocks(const std::vector<ProgramFacts>& files) {
  Hammocks out;
  std::set<std::string> seen;
  for (const auto& facts : files) {
    if (!seen.insert(facts.file).second) {
      throw InconsistentFacts("duplicate file " + facts.file);
    }
    Extractor(facts, out).run();
  }
  return out;
}

EdgeDerivation derive_edges(const ProgramFacts& facts, const Hammocks& hammocks) {
  return derive_edges(std::vector<ProgramFacts>{facts}, hammocks);
}

EdgeDerivation derive_edges(const std::vector<ProgramFacts>& files,
                            const Hammocks& hammocks) {
  EdgeDerivation result;
  auto& edges = result.edges;

  // Control: guards and procedure entries to their immediate children.
  for (const auto& [child, parent] : hammocks.containment) {
    const HammockBlock& p = hammocks.blocks.at(parent);
    const HammockBlock& c = hammocks.blocks.at(child);
    std::optional<std::string> label;
    switch (p.kind) {
      case BlockKind::kBranch:
      case BlockKind::kLoop:
      case BlockKind::kTry:
        label = std::string(to_string(hammocks.arm_of.at(child)));
        break;
      case BlockKind::kFunctionDef:
        label = "entry";
        break;
      case BlockKind::kModule:
        if (c.kind == BlockKind::kFunctionDef || c.kind == BlockKind::kClassDef) {
          continue;
        }
        label = "entry";
        break;
      default:
        continue;
    }
    edges.insert(PdgEdge{parent, child, EdgeKind::kCtl, label});
  }

  // Function name index for call resolution.
  std::map<std::string, std::vector<BlockId>> functions;
  for (const auto& [id, block] : hammocks.blocks) {
    if (block.kind == BlockKind::kFunctionDef && block.name) {
      functions[*block.name].push_back(id);
    }
  }
  auto resolve = [&](const std::string& callee) -> std::optional<BlockId> {
    auto it = functions.find(callee);
    if (it == functions.end() && callee.find('.') != std::string::npos) {
      it = functions.find(last_segment(callee));
    }
    if (it == functions.end() || it->second.size() != 1) return std::nullopt;
    return it->second.front();
  };

  for (const auto& facts : files) {
    RegionTree tree = make_tree(facts);
    FlowBuilder builder(tree, hammocks, facts.file);

    std::vector<const Region*> scopes;
    for (const auto& r : facts.regions) {
      if (r.kind == RegionKind::kModule || r.kind == RegionKind::kFunction) {
        scopes.push_back(&r);
      }
    }
    std::vector<Procedure> procs;
    for (const Region* scope : scopes) procs.push_back(builder.build(*scope));

    // Module definitions live at the module exit.
    std::map<std::string, std::vector<BlockId>> module_defs;
    for (auto& proc : procs) {
      std::vector<Definition> defs;
      auto in = reaching_definitions(proc, defs);
      for (std::size_t u = 0; u < proc.nodes.size(); ++u) {
        const FlowNode& node = proc.nodes[u];
        for (const auto& var : node.uses) {
          for (std::size_t k = 0; k < defs.size(); ++k) {
            if (!in[u][k] || defs[k].var != var) continue;
            const BlockId& from = proc.nodes[defs[k].node].owner;
            if (from == node.owner) continue;
            edges.insert(PdgEdge{from, node.owner, EdgeKind::kData, var});
          }
        }
        for (const auto& callee : node.calls) {
          auto target = resolve(callee);
          if (!target) {
            result.unresolved_calls.push_back(node.owner.value + ": " + callee);
            continue;
          }
          if (*target == node.owner) continue;
          edges.insert(PdgEdge{node.owner, *target, EdgeKind::kCall, callee});
        }
      }
      if (proc.is_module) {
        for (std::size_t k = 0; k < defs.size(); ++k) {
          if (in[proc.exit][k]) {
            module_defs[defs[k].var].push_back(proc.nodes[defs[k].node].owner);
          }
        }
      }
    }
    for (auto& proc : procs) {
      if (proc.is_module) continue;
      std::set<std::string> bound;
      for (const auto& node : proc.nodes) bound.insert(node.defs.begin(), node.defs.end());
      for (const auto& node : proc.nodes) {
        for (const auto& var : node.uses) {
          if (bound.contains(var)) continue;
          auto it = module_defs.find(var);
          if (it == module_defs.end()) continue;
          for (const BlockId& from : it->second) {
            edges.insert(PdgEdge{from, node.owner, EdgeKind::kData, var});
          }
        }
      }
    }
  }
  std::sort(result.unresolved_calls.begin(), result.unresolved_calls.end());
  result.unresolved_calls.erase(
      std::unique(result.unresolved_calls.begin(), result.unresolved_calls.end()),
      result.unresolved_calls.end());
  return result;
}

Pdg build_pdg(const ProgramFacts& facts, const std::string& service) {
  return build_pdg(std::vector<ProgramFacts>{facts}, service);
}

Pdg build_pdg(const std::vector<ProgramFacts>& files, const std::string& service,
              std::vector<std::string>* diagnostics) {
  Hammocks hammocks = extract_hammocks(files);
  EdgeDerivation derived = derive_edges(files, hammocks);
  if (diagnostics) {
    for (const auto& call : derived.unresolved_calls) {
      diagnostics->push_back("unresolved call " + call);
    }
  }
  return Pdg(service, std::move(hammocks.blocks), std::move(derived.edges),
             std::move(hammocks.containment));
}

Pdg build_service_pdg_from_sources(const std::filesystem::path& dir,
                                   const std::string& service,
                                   std::vector<std::string>* diagnostics,
                                   bool parallel) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw MissingFixture("no source directory " + dir.string());
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".mini") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw MissingFixture("no .mini sources in " + dir.string());

  std::vector<ProgramFacts> files(paths.size());
  std::vector<std::exception_ptr> errors(paths.size());
  const long n = static_cast<long>(paths.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    try {
      std::string rel = fs::relative(paths[i], dir).generic_string();
      files[i] = parse_mini_source(read_file(paths[i]), rel);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ParseError& e) {
      throw ParseError(paths[i].string() + ": " + e.message(), e.line(),
                       e.column());
    }
  }
  return build_pdg(files, service, diagnostics);
}

std::vector<ProgramFacts> load_facts_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<ProgramFacts> files;
  for (const auto& p : paths) files.push_back(facts_from_json(read_file(p)));
  return files;
}

}  // namespace graphrca
