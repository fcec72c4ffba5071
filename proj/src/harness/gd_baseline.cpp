#include "koco/harness/gd_baseline.hpp"

#include <chrono>
#include <cmath>

#include "koco/error.hpp"
#include "koco/parallel.hpp"

namespace koco::harness {

GdBaseline::GdBaseline(KernelSpec kernel, double clip_c, double lipschitz)
    : kernel_(std::move(kernel)), clip_c_(clip_c), lipschitz_(lipschitz) {
  if (!(clip_c > 0.0) || !(lipschitz > 0.0)) throw InvalidArgument("gd: C and L must be positive");
}

double GdBaseline::predict(const Point& x) const {
  kernel_.admit(x);
  DenseVec k;
  par::fill_vector(static_cast<Index>(points_.size()),
                   [&](Index i) { return kernel_.eval(points_[i], x); }, k);
  const Eigen::Map<const DenseVec> c(coef_.data(), static_cast<Index>(coef_.size()));
  return clip_prediction(points_.empty() ? 0.0 : k.dot(c), clip_c_);
}

StepRecord GdBaseline::step(const LossEvent& ev) {
  const auto start = std::chrono::steady_clock::now();
  StepRecord rec;
  rec.t = points_.size() + 1;
  rec.yhat = predict(ev.point);
  rec.ybar = rec.yhat;
  rec.loss = loss_value(ev, rec.yhat);
  rec.gdot = loss_derivative(ev, rec.yhat);
  rec.zero_derivative = rec.gdot == 0.0;
  rec.eta = 1.0 / (lipschitz_ * clip_c_ * std::sqrt(static_cast<double>(rec.t)));
  points_.push_back(ev.point);
  coef_.push_back(-rec.eta * rec.gdot);
  rec.tau = 0.0;
  rec.p_tilde = 1.0;
  rec.z = true;
  rec.dict_size = points_.size();
  rec.elapsed = std::chrono::steady_clock::now() - start;
  return rec;
}

}  // namespace koco::harness
