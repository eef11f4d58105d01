#include "rpid/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rpid {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw Error(ErrorCode::ConfigError, what + ": expected a number, got '" + s + "'");
  }
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw Error(ErrorCode::ConfigError, what + ": expected an integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw Error(ErrorCode::ConfigError, what + ": expected true/false, got '" + s + "'");
}

NodeGenerator parse_generator(const std::string& value, const CausalGraph& graph,
                              const std::string& protected_name) {
  const std::vector<std::string> parts = tokens(value);
  if (parts.size() < 2) {
    throw Error(ErrorCode::ConfigError, "generator needs '<variable> <family> key=value...'");
  }
  NodeGenerator gen;
  gen.variable = parts[0];
  const Family fam = parse_family(parts[1]);
  gen.family = fam == Family::gamma ? GlmFamily::gamma_log() : GlmFamily::bernoulli_logit();
  if (graph.index_of(gen.variable) < 0) {
    throw Error(ErrorCode::ConfigError, "generator for undeclared variable " + gen.variable);
  }
  for (std::size_t i = 2; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "generator term '" + parts[i] + "' is not key=value");
    }
    const std::string key = parts[i].substr(0, eq);
    const double v = parse_double(parts[i].substr(eq + 1), "generator " + gen.variable);
    if (key == "shape") {
      gen.shape = v;
    } else if (key == "intercept") {
      gen.intercept = v;
    } else if (key == protected_name) {
      gen.protected_coef = v;
    } else {
      gen.coefficients.emplace_back(key, v);
    }
  }
  return gen;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  cfg.config_hash = fnv1a_hex(text);

  struct Entry {
    std::string section, key, value;
  };
  std::vector<Entry> entries;
  {
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": unterminated section");
        }
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
      }
      entries.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
    }
  }

  // graph first: generators and feature lists validate against it
  for (const Entry& e : entries) {
    if (e.section != "graph") continue;
    if (e.key == "variable") {
      const std::vector<std::string> parts = tokens(e.value);
      if (parts.size() != 3) {
        throw Error(ErrorCode::ConfigError, "variable needs '<name> <kind> <role>': " + e.value);
      }
      cfg.graph.variables.push_back({parts[0], parse_var_kind(parts[1]), parse_var_role(parts[2])});
    } else if (e.key == "edge") {
      const std::vector<std::string> parts = tokens(e.value);
      if (parts.size() != 3 || parts[1] != "->") {
        throw Error(ErrorCode::ConfigError, "edge needs '<parent> -> <child>': " + e.value);
      }
      cfg.graph.edges.emplace_back(parts[0], parts[2]);
    } else if (e.key == "protected_levels") {
      cfg.protected_levels = tokens(e.value);
    } else {
      throw Error(ErrorCode::ConfigError, "unknown [graph] key: " + e.key);
    }
  }
  validate_graph_or_throw(cfg.graph);
  const std::string& prot = cfg.graph.protected_name();
  if (cfg.protected_levels.size() != 2) {
    throw Error(ErrorCode::ConfigError, "[graph] protected_levels must list two labels");
  }

  bool has_sim_entries = false;
  SimConfig sim;
  sim.graph = cfg.graph;
  sim.protected_levels = cfg.protected_levels;

  for (const Entry& e : entries) {
    if (e.section == "graph") continue;
    if (e.section == "warping") {
      if (e.key == "reference_group") cfg.reference_group = e.value;
      else if (e.key == "threshold") cfg.threshold = parse_double(e.value, "threshold");
      else throw Error(ErrorCode::ConfigError, "unknown [warping] key: " + e.key);
    } else if (e.section == "models") {
      if (e.key == "prediction_features") cfg.prediction_features = tokens(e.value);
      else throw Error(ErrorCode::ConfigError, "unknown [models] key: " + e.key);
    } else if (e.section == "simulation") {
      has_sim_entries = true;
      if (e.key == "p_protected") sim.p_level1 = parse_double(e.value, "p_protected");
      else if (e.key == "n_train") sim.n_train = parse_long(e.value, "n_train");
      else if (e.key == "n_test") sim.n_test = parse_long(e.value, "n_test");
      else if (e.key == "iterations") sim.iterations = static_cast<int>(parse_long(e.value, "iterations"));
      else if (e.key == "misspecified") sim.misspecified = parse_bool(e.value, "misspecified");
      else if (e.key == "compare_directions") sim.compare_directions = parse_bool(e.value, "compare_directions");
      else if (e.key == "generator") sim.generators.push_back(parse_generator(e.value, cfg.graph, prot));
      else throw Error(ErrorCode::ConfigError, "unknown [simulation] key: " + e.key);
    } else if (e.section == "evaluation") {
      if (e.key == "alpha") cfg.alpha = parse_double(e.value, "alpha");
      else if (e.key == "epsilon") cfg.epsilon = parse_double(e.value, "epsilon");
      else if (e.key == "top_k") cfg.top_k = parse_long(e.value, "top_k");
      else throw Error(ErrorCode::ConfigError, "unknown [evaluation] key: " + e.key);
    } else if (e.section == "io") {
      if (e.key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(e.value, "seed"));
      else throw Error(ErrorCode::ConfigError, "unknown [io] key: " + e.key);
    } else {
      throw Error(ErrorCode::ConfigError, "unknown section [" + e.section + "]");
    }
  }

  if (cfg.reference_group.empty()) {
    throw Error(ErrorCode::ConfigError, "[warping] reference_group is required");
  }
  if (std::find(cfg.protected_levels.begin(), cfg.protected_levels.end(), cfg.reference_group) ==
      cfg.protected_levels.end()) {
    throw Error(ErrorCode::ConfigError, "reference_group must be one of protected_levels");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0) || !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw Error(ErrorCode::ConfigError, "alpha and epsilon must lie in (0, 1)");
  }
  if (cfg.top_k < 1) throw Error(ErrorCode::ConfigError, "top_k must be positive");

  if (cfg.prediction_features.empty()) {
    throw Error(ErrorCode::ConfigError, "[models] prediction_features is required");
  }
  for (const std::string& f : cfg.prediction_features) {
    if (f == prot) {
      throw Error(ErrorCode::ConfigError,
                  "prediction_features must not contain the protected attribute");
    }
    const int idx = cfg.graph.index_of(f);
    if (idx < 0) throw Error(ErrorCode::ConfigError, "prediction feature not in graph: " + f);
    if (cfg.graph.variables[static_cast<std::size_t>(idx)].role == VarRole::target) {
      throw Error(ErrorCode::ConfigError, "prediction feature cannot be the target: " + f);
    }
  }

  if (has_sim_entries) {
    sim.reference_group = cfg.reference_group;
    sim.validate();
    cfg.simulation = std::move(sim);
  }
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace rpid
