#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rpid/errors.hpp"

namespace rpid {

enum class VarKind { continuous, binary };
enum class VarRole { protected_attr, confounder, mediator, target };

const char* var_kind_name(VarKind kind);
const char* var_role_name(VarRole role);
VarKind parse_var_kind(const std::string& s);
VarRole parse_var_role(const std::string& s);

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::continuous;
  VarRole role = VarRole::confounder;
};

/// Real-world DAG. The FiND-world DAG is derived from it by dropping the
/// protected attribute's edges that lie on paths to the target, so only one
/// graph is ever declared.
struct CausalGraph {
  std::vector<VariableSpec> variables;
  std::vector<std::pair<std::string, std::string>> edges;  // (parent, child)

  int index_of(const std::string& name) const;  // -1 if absent
  const std::string& protected_name() const;    // throws if not exactly one
  const std::string& target_name() const;

  /// Parents of `name` in variable declaration order.
  std::vector<std::string> parents(const std::string& name) const;
  std::vector<std::string> children(const std::string& name) const;
};

struct GraphIssue {
  ErrorCode code;
  std::string message;
};

/// Checks every CausalGraph invariant; returns all violations (empty = valid).
std::vector<GraphIssue> validate(const CausalGraph& graph);

/// validate() that throws InvalidConfig listing every violation.
void validate_graph_or_throw(const CausalGraph& graph);

/// Variables to warp: descendants of the protected attribute that lie on a
/// directed path to the target, target included, in topological order
/// (declaration order breaks ties). Throws NoPathToTarget when empty.
std::vector<std::string> warp_set(const CausalGraph& graph);

struct WarpPlan {
  std::vector<std::string> warp_order;
  std::map<std::string, std::vector<std::string>> covariates;
  std::string reference_group;
};

/// Covariates of each warp-set variable are its graph parents minus the
/// protected attribute.
WarpPlan build_warp_plan(const CausalGraph& graph, const std::string& reference_group);

}  // namespace rpid
