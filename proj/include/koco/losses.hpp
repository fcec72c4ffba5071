#pragma once

#include <string>

#include "koco/kernels.hpp"

namespace koco {

enum class LossFamily { squared, logistic, squared_hinge };

std::string to_string(LossFamily f);
/// Accepts "squared", "logistic", "squared-hinge".
LossFamily loss_family_from_string(const std::string& name);

/// One adversary round. `target` holds the regression target for the squared
/// family and the +-1 label for the classification families.
struct LossEvent {
  Point point;
  LossFamily family = LossFamily::squared;
  double target = 0.0;
};

/// Curvature sigma (lower bound of the second-order expansion), derivative bound
/// L on [-C, C], and the clip level C they were derived for.
struct CurvatureProfile {
  double sigma = 0.0;
  double lipschitz = 0.0;
  double clip_c = 0.0;
};

/// Rejects non-finite data, labels other than +-1, and squared targets outside [-C, C].
void validate_event(const LossEvent& ev, double clip_c);

double loss_value(const LossEvent& ev, double yhat);
double loss_derivative(const LossEvent& ev, double yhat);

/// Squared: sigma = 1/(8C^2), L = 4C. Logistic: sigma = exp(-C)/4 if it passes the
/// grid check, else the largest grid-passing value; L = 1. Squared hinge: sigma by
/// grid search, L = 2(1 + C).
CurvatureProfile curvature_profile(LossFamily family, double clip_c);

/// Smallest value over a (points x points) grid of (a, b) in [-C, C]^2 and all
/// targets/labels of l(b) - l(a) - l'(a)(b - a) - (sigma/2)(l'(a)(b - a))^2.
double curvature_grid_gap(LossFamily family, double clip_c, double sigma, int points = 121);

/// sign(z) * max(|z| - C, 0).
double clip_excess(double z, double clip_c);

/// z - clip_excess(z, C), evaluated as a clamp so the result lies in [-C, C] exactly.
inline double clip_prediction(double z, double clip_c) {
  return z > clip_c ? clip_c : (z < -clip_c ? -clip_c : z);
}

}  // namespace koco
