#include "koco/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "koco/error.hpp"

namespace koco {

std::string to_string(LossFamily f) {
  switch (f) {
    case LossFamily::squared:
      return "squared";
    case LossFamily::logistic:
      return "logistic";
    case LossFamily::squared_hinge:
      return "squared-hinge";
  }
  return "?";
}

LossFamily loss_family_from_string(const std::string& name) {
  if (name == "squared") return LossFamily::squared;
  if (name == "logistic") return LossFamily::logistic;
  if (name == "squared-hinge") return LossFamily::squared_hinge;
  throw InvalidArgument("unknown loss family '" + name + "'");
}

void validate_event(const LossEvent& ev, double clip_c) {
  require_finite(ev.point, "event point");
  require_finite(ev.target, "event target");
  if (ev.family == LossFamily::squared) {
    if (std::abs(ev.target) > clip_c)
      throw TargetOutOfRange("squared target " + std::to_string(ev.target) + " outside [-" +
                             std::to_string(clip_c) + ", " + std::to_string(clip_c) + "]");
  } else if (ev.target != 1.0 && ev.target != -1.0) {
    throw InvalidArgument("label must be +1 or -1, got " + std::to_string(ev.target));
  }
}

double loss_value(const LossEvent& ev, double yhat) {
  switch (ev.family) {
    case LossFamily::squared: {
      const double r = ev.target - yhat;
      return r * r;
    }
    case LossFamily::logistic: {
      const double m = -ev.target * yhat;
      // log(1 + exp(m)) without overflow
      return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    }
    case LossFamily::squared_hinge: {
      const double m = std::max(0.0, 1.0 - ev.target * yhat);
      return m * m;
    }
  }
  return 0.0;
}

double loss_derivative(const LossEvent& ev, double yhat) {
  switch (ev.family) {
    case LossFamily::squared:
      return 2.0 * (yhat - ev.target);
    case LossFamily::logistic: {
      const double m = ev.target * yhat;
      // -label * sigmoid(-m)
      const double s = m >= 0.0 ? std::exp(-m) / (1.0 + std::exp(-m)) : 1.0 / (1.0 + std::exp(m));
      return -ev.target * s;
    }
    case LossFamily::squared_hinge:
      return -2.0 * ev.target * std::max(0.0, 1.0 - ev.target * yhat);
  }
  return 0.0;
}

double curvature_grid_gap(LossFamily family, double clip_c, double sigma, int points) {
  std::vector<double> targets;
  if (family == LossFamily::squared) {
    for (int i = 0; i < 9; ++i) targets.push_back(-clip_c + 2.0 * clip_c * i / 8.0);
  } else {
    targets = {-1.0, 1.0};
  }
  double worst = std::numeric_limits<double>::infinity();
  for (const double y : targets) {
    const LossEvent ev{Point(), family, y};
    for (int i = 0; i < points; ++i) {
      const double a = -clip_c + 2.0 * clip_c * i / (points - 1);
      const double la = loss_value(ev, a);
      const double da = loss_derivative(ev, a);
      for (int j = 0; j < points; ++j) {
        const double b = -clip_c + 2.0 * clip_c * j / (points - 1);
        const double lin = da * (b - a);
        const double gap = loss_value(ev, b) - la - lin - 0.5 * sigma * lin * lin;
        worst = std::min(worst, gap);
      }
    }
  }
  return worst;
}

namespace {

constexpr double kGridSlack = 1e-12;

bool passes(LossFamily family, double clip_c, double sigma) {
  return curvature_grid_gap(family, clip_c, sigma) >= -kGridSlack;
}

// Largest sigma in [0, hi] passing the grid, shrunk by 1% so that off-grid pairs
// keep a margin.
double bisect_sigma(LossFamily family, double clip_c, double hi) {
  while (passes(family, clip_c, hi)) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (passes(family, clip_c, mid) ? lo : hi) = mid;
  }
  return 0.99 * lo;
}

}  // namespace

CurvatureProfile curvature_profile(LossFamily family, double clip_c) {
  if (!(clip_c > 0.0)) throw InvalidArgument("curvature_profile: C must be positive");
  CurvatureProfile p;
  p.clip_c = clip_c;
  switch (family) {
    case LossFamily::squared:
      p.sigma = 1.0 / (8.0 * clip_c * clip_c);
      p.lipschitz = 4.0 * clip_c;
      break;
    case LossFamily::logistic: {
      const double candidate = std::exp(-clip_c) / 4.0;
      p.sigma = passes(family, clip_c, candidate) ? candidate : bisect_sigma(family, clip_c, candidate);
      p.lipschitz = 1.0;
      break;
    }
    case LossFamily::squared_hinge:
      p.sigma = bisect_sigma(family, clip_c, 1.0);
      p.lipschitz = 2.0 * (1.0 + clip_c);
      break;
  }
  return p;
}

double clip_excess(double z, double clip_c) {
  const double excess = std::abs(z) - clip_c;
  if (excess <= 0.0) return 0.0;
  return z > 0.0 ? excess : -excess;
}

}  // namespace koco
