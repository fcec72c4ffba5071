#pragma once

#include <vector>

#include "koco/kernels.hpp"
#include "koco/kons.hpp"

namespace koco::harness {

/// Functional gradient descent: c_t = -eta_t g_t, eta_t = 1/(L C sqrt(t)),
/// prediction sum_i c_i k(x_i, x) clipped to [-C, C].
class GdBaseline {
 public:
  GdBaseline(KernelSpec kernel, double clip_c, double lipschitz);

  double predict(const Point& x) const;
  StepRecord step(const LossEvent& ev);

  std::size_t rounds() const { return points_.size(); }
  const std::vector<double>& coefficients() const { return coef_; }

 private:
  KernelSpec kernel_;
  double clip_c_;
  double lipschitz_;
  std::vector<Point> points_;
  std::vector<double> coef_;
};

}  // namespace koco::harness
