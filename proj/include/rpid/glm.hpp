#pragma once

#include <string>
#include <vector>

#include "rpid/errors.hpp"
#include "rpid/types.hpp"

namespace rpid {

enum class Family { bernoulli, gamma };
enum class Link { logit, log };

const char* family_name(Family f);
const char* link_name(Link l);
Family parse_family(const std::string& s);

/// Family/link pair; v1 allows only the canonical pairings.
struct GlmFamily {
  Family family = Family::bernoulli;
  Link link = Link::logit;

  static GlmFamily bernoulli_logit() { return {Family::bernoulli, Link::logit}; }
  static GlmFamily gamma_log() { return {Family::gamma, Link::log}; }
  static GlmFamily for_kind_binary(bool binary) {
    return binary ? bernoulli_logit() : gamma_log();
  }
  void check() const;
};

struct GlmFit {
  GlmFamily family;
  std::vector<std::string> feature_names;
  VectorXd coefficients;  // intercept first, then one per feature
  double dispersion = 1.0;  // Gamma shape estimate (Pearson); 1.0 for bernoulli
  bool converged = false;
  int iterations = 0;
};

inline constexpr double kIrlsTolerance = 1e-8;
inline constexpr int kIrlsMaxIterations = 100;
inline constexpr double kSeparationCoefCap = 30.0;

/// IRLS (Fisher scoring). `features` is n x p without an intercept column;
/// the intercept is handled internally. Deterministic for identical input.
/// Bernoulli responses may be any reals in [0, 1]; gamma responses must be
/// strictly positive. Throws SeparationDetected, SingularDesign,
/// InvalidResponse, TooFewRows. Hitting the iteration limit returns the fit
/// with converged = false.
GlmFit fit_glm(const GlmFamily& family, const MatRef& features, const VecRef& response,
               std::vector<std::string> feature_names);

/// Inverse link of the linear predictor for one design row (no intercept
/// entry; aligned to fit.feature_names).
double predict_mean(const GlmFit& fit, const VecRef& row);

/// Row-wise predict_mean; kept loop-per-row so that single-observation and
/// table paths produce bitwise-identical values.
VectorXd predict_mean(const GlmFit& fit, const MatRef& rows);

/// Response-scale residuals: response - predict_mean.
VectorXd residuals(const GlmFit& fit, const MatRef& rows, const VecRef& response);

}  // namespace rpid
