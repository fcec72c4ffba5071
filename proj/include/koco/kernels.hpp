#pragma once

#include <string>
#include <variant>
#include <vector>

#include "koco/linalg.hpp"

namespace koco {

/// A point of the input space.
using Point = DenseVec;

struct GaussianKernel {
  double bandwidth = 1.0;
};
/// x^T y / (|x| |y|).
struct LinearNormalizedKernel {};
/// (x^T y + offset)^degree, cosine-normalized.
struct PolynomialNormalizedKernel {
  int degree = 2;
  double offset = 1.0;
};

/// A normalized positive-definite kernel: k(x, x) = 1 for every admissible x.
/// The Gaussian kernel is exp(-|x - y|^2 / (2 bandwidth^2)).
class KernelSpec {
 public:
  using Family = std::variant<GaussianKernel, LinearNormalizedKernel, PolynomialNormalizedKernel>;

  KernelSpec() : family_(GaussianKernel{}) {}
  explicit KernelSpec(Family family);

  static KernelSpec gaussian(double bandwidth) { return KernelSpec(GaussianKernel{bandwidth}); }
  static KernelSpec linear() { return KernelSpec(LinearNormalizedKernel{}); }
  static KernelSpec polynomial(int degree, double offset) {
    return KernelSpec(PolynomialNormalizedKernel{degree, offset});
  }

  const Family& family() const { return family_; }
  std::string name() const;

  /// Throws DimensionMismatch, or ZeroNormPoint when normalization is undefined.
  double eval(const Point& x, const Point& y) const;

  /// Checks that x is finite and normalizable under this kernel.
  void admit(const Point& x) const;

 private:
  Family family_;
};

double eval(const KernelSpec& k, const Point& x, const Point& y);

/// Entry i is k(history[i], x).
DenseVec cross_vector(const KernelSpec& k, const std::vector<Point>& history, const Point& x);
DenseVec cross_vector_serial(const KernelSpec& k, const std::vector<Point>& history,
                             const Point& x);

/// Gram matrix with unit diagonal.
SymMat gram(const KernelSpec& k, const std::vector<Point>& points);
SymMat gram_serial(const KernelSpec& k, const std::vector<Point>& points);

}  // namespace koco
