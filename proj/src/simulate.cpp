#include "rpid/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "rpid/special_functions.hpp"

namespace rpid {

namespace {

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// One uniform stream per (seed, node); values in the open unit interval.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t node) : engine_(splitmix64(seed) ^ splitmix64(node * 0x632be59bd9b4e019ULL + 0x9e3779b97f4a7c15ULL)) {}

  double next() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    // keep gamma draws strictly positive and bernoulli cuts well-defined
    return std::fmin(std::fmax(u, 0x1.0p-53), 1.0 - 0x1.0p-53);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

const NodeGenerator& SimConfig::generator_for(const std::string& variable) const {
  for (const NodeGenerator& g : generators) {
    if (g.variable == variable) return g;
  }
  throw Error(ErrorCode::InvalidConfig, "no generator for variable " + variable);
}

void SimConfig::validate() const {
  validate_graph_or_throw(graph);
  if (protected_levels.size() != 2 || protected_levels[0] == protected_levels[1]) {
    throw Error(ErrorCode::InvalidConfig, "protected attribute needs two distinct levels");
  }
  if (!(p_level1 > 0.0 && p_level1 < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "protected-level probability must lie in (0, 1)");
  }
  if (reference_group != protected_levels[0] && reference_group != protected_levels[1]) {
    throw Error(ErrorCode::InvalidConfig, "reference_group is not a protected level");
  }
  if (n_train < 1 || n_test < 1 || iterations < 1) {
    throw Error(ErrorCode::InvalidConfig, "n_train, n_test and iterations must be positive");
  }

  const std::string& prot = graph.protected_name();
  for (const VariableSpec& v : graph.variables) {
    if (v.role == VarRole::protected_attr) continue;
    const NodeGenerator& g = generator_for(v.name);  // throws when missing
    const bool wants_gamma = v.kind == VarKind::continuous;
    if (wants_gamma != (g.family.family == Family::gamma)) {
      throw Error(ErrorCode::InvalidConfig,
                  v.name + ": family must be " + (wants_gamma ? "gamma" : "bernoulli"));
    }
    if (g.family.family == Family::gamma && g.shape <= 0.0) {
      throw Error(ErrorCode::InvalidConfig, v.name + ": gamma shape must be positive");
    }
    const std::vector<std::string> parents = graph.parents(v.name);
    for (const auto& [name, coef] : g.coefficients) {
      (void)coef;
      if (std::find(parents.begin(), parents.end(), name) == parents.end()) {
        throw Error(ErrorCode::InvalidConfig,
                    v.name + ": coefficient references non-parent " + name);
      }
      if (name == prot) {
        throw Error(ErrorCode::InvalidConfig,
                    v.name + ": the protected attribute enters via its level indicator");
      }
    }
    if (g.protected_coef != 0.0) {
      const bool is_parent = std::find(parents.begin(), parents.end(), prot) != parents.end();
      const bool sim2_confounder = misspecified && v.role == VarRole::confounder;
      if (!is_parent && !sim2_confounder) {
        throw Error(ErrorCode::InvalidConfig,
                    v.name + ": protected-level coefficient requires the protected attribute as "
                             "parent (or SIM2 confounder mode)");
      }
    }
  }

  int count = 0;
  for (const VariableSpec& v : graph.variables) {
    if (v.role != VarRole::protected_attr) ++count;
  }
  if (static_cast<int>(generators.size()) != count) {
    throw Error(ErrorCode::InvalidConfig, "generators must cover exactly the non-protected variables");
  }
}

WorldPair simulate_pair(const SimConfig& config, std::uint64_t seed) {
  config.validate();
  const CausalGraph& graph = config.graph;
  const Index n = config.n_train + config.n_test;
  const std::string& prot = graph.protected_name();

  const std::vector<std::string> warp_vars = warp_set(graph);
  auto in_warp_set = [&](const std::string& name) {
    return std::find(warp_vars.begin(), warp_vars.end(), name) != warp_vars.end();
  };

  // node processing order: parents before children
  std::vector<std::string> order;
  {
    std::vector<std::string> remaining;
    for (const VariableSpec& v : graph.variables) remaining.push_back(v.name);
    while (!remaining.empty()) {
      for (auto it = remaining.begin(); it != remaining.end(); ++it) {
        const std::vector<std::string> parents = graph.parents(*it);
        const bool ready = std::all_of(parents.begin(), parents.end(), [&](const std::string& p) {
          return std::find(order.begin(), order.end(), p) != order.end();
        });
        if (ready) {
          order.push_back(*it);
          remaining.erase(it);
          break;
        }
      }
    }
  }

  std::vector<std::string> group(static_cast<std::size_t>(n));
  VectorXd level1_indicator(n);
  std::map<std::string, VectorXd> real_cols, find_cols;

  const double ref_indicator =
      config.reference_group == config.protected_levels[1] ? 1.0 : 0.0;

  for (const std::string& var : order) {
    const std::uint64_t node_id = static_cast<std::uint64_t>(graph.index_of(var));
    UniformStream stream(seed, node_id);

    if (var == prot) {
      for (Index i = 0; i < n; ++i) {
        const bool second = stream.next() < config.p_level1;
        group[static_cast<std::size_t>(i)] = config.protected_levels[second ? 1 : 0];
        level1_indicator[i] = second ? 1.0 : 0.0;
      }
      continue;
    }

    const NodeGenerator& gen = config.generator_for(var);
    const bool force_reference = in_warp_set(var);

    VectorXd real_v(n), find_v(n);
    for (Index i = 0; i < n; ++i) {
      double eta_real = gen.intercept;
      double eta_find = gen.intercept;
      for (const auto& [cov, coef] : gen.coefficients) {
        eta_real += coef * real_cols.at(cov)[i];
        eta_find += coef * find_cols.at(cov)[i];
      }
      eta_real += gen.protected_coef * level1_indicator[i];
      eta_find += gen.protected_coef * (force_reference ? ref_indicator : level1_indicator[i]);

      const double u = stream.next();
      if (gen.family.family == Family::gamma) {
        // shared standard draw, scaled by each world's mean
        const double z = sf::inv_reg_inc_gamma_lower(gen.shape, u);
        real_v[i] = z * std::exp(eta_real) / gen.shape;
        find_v[i] = z * std::exp(eta_find) / gen.shape;
      } else {
        real_v[i] = u > 1.0 - logistic(eta_real) ? 1.0 : 0.0;
        find_v[i] = u > 1.0 - logistic(eta_find) ? 1.0 : 0.0;
      }
    }
    real_cols[var] = std::move(real_v);
    find_cols[var] = std::move(find_v);
  }

  auto build = [&](const std::map<std::string, VectorXd>& cols, Index from, Index count) {
    ColumnTable t;
    for (const VariableSpec& v : graph.variables) {
      if (v.name == prot) {
        std::vector<std::string> g(static_cast<std::size_t>(count));
        for (Index i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = group[static_cast<std::size_t>(from + i)];
        t.add_text(v.name, std::move(g));
      } else {
        t.add_numeric(v.name, cols.at(v.name).segment(from, count));
      }
    }
    return t;
  };

  WorldPair pair;
  pair.real_train = build(real_cols, 0, config.n_train);
  pair.real_test = build(real_cols, config.n_train, config.n_test);
  pair.find_train = build(find_cols, 0, config.n_train);
  pair.find_test = build(find_cols, config.n_train, config.n_test);
  return pair;
}

}  // namespace rpid
