#include "koco/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "koco/error.hpp"
#include "koco/parallel.hpp"

namespace koco {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double poly_raw(const PolynomialNormalizedKernel& p, double inner) {
  return std::pow(inner + p.offset, p.degree);
}

}  // namespace

KernelSpec::KernelSpec(Family family) : family_(family) {
  std::visit(overloaded{
                 [](const GaussianKernel& g) {
                   if (!(g.bandwidth > 0.0) || !std::isfinite(g.bandwidth))
                     throw InvalidArgument("gaussian kernel: bandwidth must be positive");
                 },
                 [](const LinearNormalizedKernel&) {},
                 [](const PolynomialNormalizedKernel& p) {
                   if (p.degree < 1)
                     throw InvalidArgument("polynomial kernel: degree must be >= 1");
                   if (!(p.offset >= 0.0) || !std::isfinite(p.offset))
                     throw InvalidArgument("polynomial kernel: offset must be >= 0");
                 },
             },
             family_);
}

std::string KernelSpec::name() const {
  return std::visit(overloaded{
                        [](const GaussianKernel&) { return std::string("gaussian"); },
                        [](const LinearNormalizedKernel&) { return std::string("linear"); },
                        [](const PolynomialNormalizedKernel&) { return std::string("polynomial"); },
                    },
                    family_);
}

double KernelSpec::eval(const Point& x, const Point& y) const {
  if (x.size() != y.size())
    throw DimensionMismatch("kernel eval: dimensions " + std::to_string(x.size()) + " and " +
                            std::to_string(y.size()));
  return std::visit(
      overloaded{
          [&](const GaussianKernel& g) {
            const double d2 = (x - y).squaredNorm();
            return std::exp(-d2 / (2.0 * g.bandwidth * g.bandwidth));
          },
          [&](const LinearNormalizedKernel&) {
            const double nx = x.norm();
            const double ny = y.norm();
            if (nx == 0.0 || ny == 0.0)
              throw ZeroNormPoint("linear kernel: zero vector cannot be normalized");
            if (x == y) return 1.0;
            return std::clamp(x.dot(y) / (nx * ny), -1.0, 1.0);
          },
          [&](const PolynomialNormalizedKernel& p) {
            const double kxx = poly_raw(p, x.squaredNorm());
            const double kyy = poly_raw(p, y.squaredNorm());
            if (kxx == 0.0 || kyy == 0.0)
              throw ZeroNormPoint("polynomial kernel: zero self-similarity");
            if (x == y) return 1.0;
            return std::clamp(poly_raw(p, x.dot(y)) / (std::sqrt(kxx) * std::sqrt(kyy)), -1.0,
                              1.0);
          },
      },
      family_);
}

void KernelSpec::admit(const Point& x) const {
  require_finite(x, "point");
  if (std::holds_alternative<GaussianKernel>(family_)) return;
  (void)eval(x, x);
}

double eval(const KernelSpec& k, const Point& x, const Point& y) { return k.eval(x, y); }

namespace {

// Kernel loops run inside OpenMP regions, which must not throw; every point is
// admitted up front so the loops below cannot fail.
void admit_all(const KernelSpec& k, const std::vector<Point>& points, Index dim) {
  for (const Point& p : points) {
    if (p.size() != dim)
      throw DimensionMismatch("kernel: point dimension " + std::to_string(p.size()) +
                              ", expected " + std::to_string(dim));
    k.admit(p);
  }
}

}  // namespace

DenseVec cross_vector(const KernelSpec& k, const std::vector<Point>& history, const Point& x) {
  k.admit(x);
  admit_all(k, history, x.size());
  DenseVec out;
  par::fill_vector(static_cast<Index>(history.size()),
                   [&](Index i) { return k.eval(history[i], x); }, out);
  return out;
}

DenseVec cross_vector_serial(const KernelSpec& k, const std::vector<Point>& history,
                             const Point& x) {
  k.admit(x);
  admit_all(k, history, x.size());
  DenseVec out;
  par::fill_vector_serial(static_cast<Index>(history.size()),
                          [&](Index i) { return k.eval(history[i], x); }, out);
  return out;
}

SymMat gram(const KernelSpec& k, const std::vector<Point>& points) {
  if (!points.empty()) admit_all(k, points, points.front().size());
  DenseMat g;
  par::fill_symmetric(static_cast<Index>(points.size()),
                      [&](Index i, Index j) { return i == j ? 1.0 : k.eval(points[i], points[j]); },
                      g);
  return SymMat(std::move(g));
}

SymMat gram_serial(const KernelSpec& k, const std::vector<Point>& points) {
  if (!points.empty()) admit_all(k, points, points.front().size());
  DenseMat g;
  par::fill_symmetric_serial(
      static_cast<Index>(points.size()),
      [&](Index i, Index j) { return i == j ? 1.0 : k.eval(points[i], points[j]); }, g);
  return SymMat(std::move(g));
}

}  // namespace koco
