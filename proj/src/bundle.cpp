#include "rpid/bundle.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rpid {

namespace {

using json = nlohmann::ordered_json;

json vector_to_json(const VectorXd& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

VectorXd vector_from_json(const json& arr) {
  VectorXd v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Index>(i)] = arr[i].get<double>();
  return v;
}

json fit_to_json(const GlmFit& fit) {
  json j;
  j["family"] = family_name(fit.family.family);
  j["link"] = link_name(fit.family.link);
  j["feature_names"] = fit.feature_names;
  j["coefficients"] = vector_to_json(fit.coefficients);
  j["dispersion"] = fit.dispersion;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  return j;
}

GlmFit fit_from_json(const json& j) {
  GlmFit fit;
  fit.family.family = parse_family(j.at("family").get<std::string>());
  fit.family.link = fit.family.family == Family::gamma ? Link::log : Link::logit;
  if (j.at("link").get<std::string>() != link_name(fit.family.link)) {
    throw Error(ErrorCode::SchemaMismatch, "unsupported family/link pairing in bundle");
  }
  fit.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  fit.coefficients = vector_from_json(j.at("coefficients"));
  fit.dispersion = j.at("dispersion").get<double>();
  fit.converged = j.at("converged").get<bool>();
  fit.iterations = j.at("iterations").get<int>();
  return fit;
}

json model_to_json(const WarpModel& m) {
  json j;
  j["variable"] = m.variable;
  j["kind"] = var_kind_name(m.kind);
  j["covariates"] = m.covariates;
  j["reference_group"] = m.reference_group;
  j["ref_fit"] = fit_to_json(m.ref_fit);
  j["nonref_fit"] = fit_to_json(m.nonref_fit);
  j["ref_pool"] = vector_to_json(m.ref_pool.sorted);
  j["nonref_pool"] = vector_to_json(m.nonref_pool.sorted);
  return j;
}

WarpModel model_from_json(const json& j) {
  WarpModel m;
  m.variable = j.at("variable").get<std::string>();
  m.kind = parse_var_kind(j.at("kind").get<std::string>());
  m.covariates = j.at("covariates").get<std::vector<std::string>>();
  m.reference_group = j.at("reference_group").get<std::string>();
  m.ref_fit = fit_from_json(j.at("ref_fit"));
  m.nonref_fit = fit_from_json(j.at("nonref_fit"));
  m.ref_pool = ResidualPool{vector_from_json(j.at("ref_pool"))};
  m.nonref_pool = ResidualPool{vector_from_json(j.at("nonref_pool"))};
  return m;
}

}  // namespace

std::string provenance_timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string bundle_to_json(const ModelBundle& bundle) {
  json j;
  j["format_version"] = bundle.format_version;
  j["plan"]["warp_order"] = bundle.plan.warp_order;
  json covs;
  for (const auto& [var, c] : bundle.plan.covariates) covs[var] = c;
  j["plan"]["covariates"] = std::move(covs);
  j["plan"]["reference_group"] = bundle.plan.reference_group;
  json models;
  for (const auto& [var, m] : bundle.models) models[var] = model_to_json(m);
  j["models"] = std::move(models);
  j["prediction_fit"] = bundle.prediction_fit ? fit_to_json(*bundle.prediction_fit) : json(nullptr);
  j["prediction_features"] = bundle.prediction_features;
  j["threshold"] = bundle.threshold;
  j["protected"] = bundle.protected_name;
  j["protected_levels"] = bundle.protected_levels;
  j["target"] = bundle.target_name;
  j["provenance"]["config_hash"] = bundle.provenance.config_hash;
  j["provenance"]["seed"] = bundle.provenance.seed;
  j["provenance"]["timestamp"] = bundle.provenance.timestamp;
  return j.dump(2);
}

ModelBundle bundle_from_json(const std::string& text) {
  json j = json::parse(text);
  ModelBundle b;
  b.format_version = j.at("format_version").get<int>();
  if (b.format_version != kBundleFormatVersion) {
    throw Error(ErrorCode::BundleVersionMismatch,
                "bundle format " + std::to_string(b.format_version) + ", expected " +
                    std::to_string(kBundleFormatVersion));
  }
  b.plan.warp_order = j.at("plan").at("warp_order").get<std::vector<std::string>>();
  for (const auto& [var, c] : j.at("plan").at("covariates").items()) {
    b.plan.covariates[var] = c.get<std::vector<std::string>>();
  }
  b.plan.reference_group = j.at("plan").at("reference_group").get<std::string>();
  for (const auto& [var, m] : j.at("models").items()) b.models[var] = model_from_json(m);
  if (!j.at("prediction_fit").is_null()) b.prediction_fit = fit_from_json(j.at("prediction_fit"));
  b.prediction_features = j.at("prediction_features").get<std::vector<std::string>>();
  b.threshold = j.at("threshold").get<double>();
  b.protected_name = j.at("protected").get<std::string>();
  b.protected_levels = j.at("protected_levels").get<std::vector<std::string>>();
  b.target_name = j.at("target").get<std::string>();
  b.provenance.config_hash = j.at("provenance").at("config_hash").get<std::string>();
  b.provenance.seed = j.at("provenance").at("seed").get<std::uint64_t>();
  b.provenance.timestamp = j.at("provenance").at("timestamp").get<std::string>();
  return b;
}

void save_bundle(const std::string& path, const ModelBundle& bundle) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << bundle_to_json(bundle) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return bundle_from_json(buf.str());
}

}  // namespace rpid
