#include "rpid/causal_graph.hpp"

#include <algorithm>
#include <queue>

namespace rpid {

const char* var_kind_name(VarKind kind) {
  return kind == VarKind::continuous ? "continuous" : "binary";
}

const char* var_role_name(VarRole role) {
  switch (role) {
    case VarRole::protected_attr: return "protected";
    case VarRole::confounder: return "confounder";
    case VarRole::mediator: return "mediator";
    case VarRole::target: return "target";
  }
  return "?";
}

VarKind parse_var_kind(const std::string& s) {
  if (s == "continuous") return VarKind::continuous;
  if (s == "binary") return VarKind::binary;
  throw Error(ErrorCode::ConfigError, "unknown variable kind: " + s);
}

VarRole parse_var_role(const std::string& s) {
  if (s == "protected") return VarRole::protected_attr;
  if (s == "confounder") return VarRole::confounder;
  if (s == "mediator") return VarRole::mediator;
  if (s == "target") return VarRole::target;
  throw Error(ErrorCode::ConfigError, "unknown variable role: " + s);
}

int CausalGraph::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const std::string& CausalGraph::protected_name() const {
  for (const VariableSpec& v : variables) {
    if (v.role == VarRole::protected_attr) return v.name;
  }
  throw Error(ErrorCode::MissingProtected, "graph declares no protected attribute");
}

const std::string& CausalGraph::target_name() const {
  for (const VariableSpec& v : variables) {
    if (v.role == VarRole::target) return v.name;
  }
  throw Error(ErrorCode::MissingTarget, "graph declares no target");
}

std::vector<std::string> CausalGraph::parents(const std::string& name) const {
  std::vector<std::string> out;
  for (const VariableSpec& v : variables) {
    for (const auto& [from, to] : edges) {
      if (to == name && from == v.name) {
        out.push_back(from);
        break;
      }
    }
  }
  return out;
}

std::vector<std::string> CausalGraph::children(const std::string& name) const {
  std::vector<std::string> out;
  for (const VariableSpec& v : variables) {
    for (const auto& [from, to] : edges) {
      if (from == name && to == v.name) {
        out.push_back(to);
        break;
      }
    }
  }
  return out;
}

namespace {

/// Adjacency over variable indices; unknown edge endpoints are skipped (they
/// are reported separately by validate()).
std::vector<std::vector<int>> adjacency(const CausalGraph& g) {
  std::vector<std::vector<int>> adj(g.variables.size());
  for (const auto& [from, to] : g.edges) {
    const int a = g.index_of(from);
    const int b = g.index_of(to);
    if (a >= 0 && b >= 0) adj[static_cast<std::size_t>(a)].push_back(b);
  }
  return adj;
}

bool has_cycle(const CausalGraph& g) {
  const auto adj = adjacency(g);
  const std::size_t n = g.variables.size();
  std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
  std::vector<std::pair<int, std::size_t>> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (state[s] != 0) continue;
    stack.push_back({static_cast<int>(s), 0});
    state[s] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < adj[static_cast<std::size_t>(v)].size()) {
        const int w = adj[static_cast<std::size_t>(v)][i++];
        if (state[static_cast<std::size_t>(w)] == 1) return true;
        if (state[static_cast<std::size_t>(w)] == 0) {
          state[static_cast<std::size_t>(w)] = 1;
          stack.push_back({w, 0});
        }
      } else {
        state[static_cast<std::size_t>(v)] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

std::vector<bool> reachable_from(const std::vector<std::vector<int>>& adj, int start) {
  std::vector<bool> seen(adj.size(), false);
  std::queue<int> q;
  q.push(start);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        q.push(w);
      }
    }
  }
  return seen;
}

/// Kahn's algorithm picking the smallest declaration index among ready nodes,
/// which makes the order deterministic and edge-list-order invariant.
std::vector<int> topo_order(const CausalGraph& g) {
  const auto adj = adjacency(g);
  const std::size_t n = g.variables.size();
  std::vector<int> indeg(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    for (int w : adj[v]) ++indeg[static_cast<std::size_t>(w)];
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) ready.push(static_cast<int>(v));
  }
  std::vector<int> order;
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
  }
  return order;  // shorter than n iff cyclic
}

}  // namespace

std::vector<GraphIssue> validate(const CausalGraph& graph) {
  std::vector<GraphIssue> issues;

  for (std::size_t i = 0; i < graph.variables.size(); ++i) {
    for (std::size_t j = i + 1; j < graph.variables.size(); ++j) {
      if (graph.variables[i].name == graph.variables[j].name) {
        issues.push_back({ErrorCode::DuplicateVariable,
                          "variable declared twice: " + graph.variables[i].name});
      }
    }
  }

  int n_protected = 0, n_target = 0;
  for (const VariableSpec& v : graph.variables) {
    if (v.role == VarRole::protected_attr) {
      ++n_protected;
      if (v.kind != VarKind::binary) {
        issues.push_back({ErrorCode::ProtectedNotBinary, v.name + " must be binary"});
      }
    }
    if (v.role == VarRole::target) {
      ++n_target;
      if (v.kind != VarKind::binary) {
        issues.push_back({ErrorCode::TargetNotBinary, v.name + " must be binary"});
      }
    }
  }
  if (n_protected != 1) {
    issues.push_back({ErrorCode::MissingProtected,
                      "expected exactly one protected variable, found " + std::to_string(n_protected)});
  }
  if (n_target != 1) {
    issues.push_back({ErrorCode::MissingTarget,
                      "expected exactly one target variable, found " + std::to_string(n_target)});
  }

  for (const auto& [from, to] : graph.edges) {
    if (graph.index_of(from) < 0) {
      issues.push_back({ErrorCode::UnknownVariableInEdge, "edge references unknown variable " + from});
    }
    if (graph.index_of(to) < 0) {
      issues.push_back({ErrorCode::UnknownVariableInEdge, "edge references unknown variable " + to});
    }
  }

  if (has_cycle(graph)) {
    issues.push_back({ErrorCode::CycleDetected, "edge set contains a directed cycle"});
  }

  if (n_target == 1) {
    const std::string& target = graph.target_name();
    for (const auto& [from, to] : graph.edges) {
      if (from == target) {
        issues.push_back({ErrorCode::TargetHasChildren, "target has outgoing edge to " + to});
        break;
      }
    }
  }

  return issues;
}

void validate_graph_or_throw(const CausalGraph& graph) {
  const std::vector<GraphIssue> issues = validate(graph);
  if (!issues.empty()) {
    std::string msg = "invalid graph:";
    for (const GraphIssue& issue : issues) msg += " [" + issue.message + "]";
    throw Error(ErrorCode::InvalidConfig, msg);
  }
}

std::vector<std::string> warp_set(const CausalGraph& graph) {
  const auto adj = adjacency(graph);
  const int prot = graph.index_of(graph.protected_name());
  const int target = graph.index_of(graph.target_name());

  const std::vector<bool> below_protected = reachable_from(adj, prot);

  // reverse reachability from the target
  std::vector<std::vector<int>> radj(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v) {
    for (int w : adj[v]) radj[static_cast<std::size_t>(w)].push_back(static_cast<int>(v));
  }
  std::vector<bool> above_target = reachable_from(radj, target);
  above_target[static_cast<std::size_t>(target)] = true;

  std::vector<std::string> out;
  for (int v : topo_order(graph)) {
    if (v == prot) continue;
    if (below_protected[static_cast<std::size_t>(v)] && above_target[static_cast<std::size_t>(v)]) {
      out.push_back(graph.variables[static_cast<std::size_t>(v)].name);
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::NoPathToTarget,
                "protected attribute has no directed path to the target; warping is a no-op");
  }
  return out;
}

WarpPlan build_warp_plan(const CausalGraph& graph, const std::string& reference_group) {
  WarpPlan plan;
  plan.warp_order = warp_set(graph);
  plan.reference_group = reference_group;
  const std::string& prot = graph.protected_name();
  for (const std::string& var : plan.warp_order) {
    std::vector<std::string> covs = graph.parents(var);
    covs.erase(std::remove(covs.begin(), covs.end(), prot), covs.end());
    plan.covariates[var] = std::move(covs);
  }
  return plan;
}

}  // namespace rpid
