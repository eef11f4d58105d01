#include "rpid/glm.hpp"

#include <cmath>

namespace rpid {

const char* family_name(Family f) { return f == Family::bernoulli ? "bernoulli" : "gamma"; }
const char* link_name(Link l) { return l == Link::logit ? "logit" : "log"; }

Family parse_family(const std::string& s) {
  if (s == "bernoulli") return Family::bernoulli;
  if (s == "gamma") return Family::gamma;
  throw Error(ErrorCode::ConfigError, "unknown family: " + s);
}

void GlmFamily::check() const {
  const bool ok = (family == Family::bernoulli && link == Link::logit) ||
                  (family == Family::gamma && link == Link::log);
  if (!ok) throw Error(ErrorCode::InvalidArgs, "unsupported family/link pairing");
}

namespace {

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

constexpr double kMinBernoulliWeight = 1e-10;

void check_response(const GlmFamily& family, const VecRef& y) {
  for (Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) throw Error(ErrorCode::InvalidResponse, "non-finite response");
    if (family.family == Family::bernoulli && (y[i] < 0.0 || y[i] > 1.0)) {
      throw Error(ErrorCode::InvalidResponse, "bernoulli response outside [0, 1]");
    }
    if (family.family == Family::gamma && y[i] <= 0.0) {
      throw Error(ErrorCode::InvalidResponse, "gamma response must be strictly positive");
    }
  }
}

}  // namespace

GlmFit fit_glm(const GlmFamily& family, const MatRef& features, const VecRef& response,
               std::vector<std::string> feature_names) {
  family.check();
  const Index n = features.rows();
  const Index p = features.cols();
  if (static_cast<Index>(feature_names.size()) != p) {
    throw Error(ErrorCode::DimensionMismatch, "feature_names size does not match feature count");
  }
  if (response.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "response length does not match row count");
  }
  if (n < p + 2) {
    throw Error(ErrorCode::TooFewRows,
                "need at least " + std::to_string(p + 2) + " rows, got " + std::to_string(n));
  }
  check_response(family, response);

  MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = features;

  // working start: eta from the adjusted response
  VectorXd eta(n);
  if (family.family == Family::gamma) {
    for (Index i = 0; i < n; ++i) eta[i] = std::log(response[i]);
  } else {
    for (Index i = 0; i < n; ++i) {
      const double mu0 = (response[i] + 0.5) / 2.0;
      eta[i] = std::log(mu0 / (1.0 - mu0));
    }
  }

  GlmFit fit;
  fit.family = family;
  fit.feature_names = std::move(feature_names);
  fit.coefficients = VectorXd::Zero(p + 1);

  VectorXd beta = VectorXd::Zero(p + 1);
  bool have_beta = false;
  VectorXd w(n), z(n);

  for (int iter = 1; iter <= kIrlsMaxIterations; ++iter) {
    if (family.family == Family::bernoulli) {
      for (Index i = 0; i < n; ++i) {
        const double mu = logistic(eta[i]);
        const double v = std::fmax(mu * (1.0 - mu), kMinBernoulliWeight);
        w[i] = v;
        z[i] = eta[i] + (response[i] - mu) / v;
      }
    } else {
      for (Index i = 0; i < n; ++i) {
        const double mu = std::exp(eta[i]);
        w[i] = 1.0;  // gamma/log: (dmu/deta)^2 / V(mu) = 1
        z[i] = eta[i] + (response[i] - mu) / mu;
      }
    }

    const VectorXd sqrt_w = w.array().sqrt();
    const MatrixXd weighted = design.array().colwise() * sqrt_w.array();
    Eigen::ColPivHouseholderQR<MatrixXd> qr(weighted);
    qr.setThreshold(1e-10);
    if (qr.rank() < p + 1) {
      throw Error(ErrorCode::SingularDesign, "design matrix is rank-deficient");
    }
    const VectorXd beta_new = qr.solve((z.array() * sqrt_w.array()).matrix());

    const double delta = have_beta ? (beta_new - beta).cwiseAbs().maxCoeff()
                                   : std::numeric_limits<double>::infinity();
    beta = beta_new;
    have_beta = true;
    fit.iterations = iter;

    if (delta < kIrlsTolerance) {
      fit.converged = true;
      break;
    }
    if (beta.cwiseAbs().maxCoeff() > kSeparationCoefCap) {
      throw Error(ErrorCode::SeparationDetected,
                  "coefficient magnitude exceeded " + std::to_string(kSeparationCoefCap) +
                      " before convergence");
    }
    eta = design * beta;
  }

  fit.coefficients = beta;

  if (family.family == Family::gamma) {
    eta = design * beta;
    double pearson = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double mu = std::exp(eta[i]);
      const double r = (response[i] - mu) / mu;
      pearson += r * r;
    }
    const double dof = static_cast<double>(n - (p + 1));
    const double phi = pearson / dof;
    fit.dispersion = phi > 1e-12 ? std::fmin(1.0 / phi, 1e12) : 1e12;
  } else {
    fit.dispersion = 1.0;
  }
  return fit;
}

double predict_mean(const GlmFit& fit, const VecRef& row) {
  if (row.size() + 1 != fit.coefficients.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "design row has " + std::to_string(row.size()) + " entries, fit expects " +
                    std::to_string(fit.coefficients.size() - 1));
  }
  double eta = fit.coefficients[0];
  for (Index j = 0; j < row.size(); ++j) eta += fit.coefficients[j + 1] * row[j];
  if (fit.family.family == Family::bernoulli) return logistic(eta);
  return std::exp(eta);
}

VectorXd predict_mean(const GlmFit& fit, const MatRef& rows) {
  VectorXd out(rows.rows());
  for (Index i = 0; i < rows.rows(); ++i) out[i] = predict_mean(fit, rows.row(i).transpose());
  return out;
}

VectorXd residuals(const GlmFit& fit, const MatRef& rows, const VecRef& response) {
  if (response.size() != rows.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "response length does not match row count");
  }
  return response - predict_mean(fit, rows);
}

}  // namespace rpid
