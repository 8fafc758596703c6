#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "curveforge/errors.hpp"
#include "curveforge/vec3.hpp"

namespace curveforge::bezier {

inline constexpr int kMaxDegree = 64;

// Ordered control points w_0..w_n of a degree-n curve used by the gate
// pipeline. Degree 3 is the minimum because gate fixing reads third
// derivatives at both endpoints.
class ControlPointSet {
 public:
  ControlPointSet() = default;
  explicit ControlPointSet(std::vector<Vec3> points);

  int degree() const { return static_cast<int>(points_.size()) - 1; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<Vec3> points_;
};

struct CurveSample {
  double x = 0.0;
  Vec3 value;
  // derivatives[q - 1] holds d^q r / dx^q.
  std::vector<Vec3> derivatives;

  const Vec3& derivative(int q) const { return derivatives.at(static_cast<std::size_t>(q - 1)); }
};

// Bernstein weights g_{j,n}(x) = C(n,j) x^j (1-x)^(n-j), j = 0..n.
std::vector<double> bernstein_basis(int n, double x);

// Fills `out` (size n+1) without allocating; x must already be validated.
void bernstein_basis_into(int n, double x, std::span<double> out);

// q-th forward differences of the points and the factor n!/(n-q)!.
template <typename T>
std::pair<std::vector<Vector3<T>>, double> diff_control_points(std::span<const Vector3<T>> points,
                                                               int q) {
  const int n = static_cast<int>(points.size()) - 1;
  if (q < 0 || q > n) throw DomainError("diff_control_points: order exceeds degree");
  std::vector<Vector3<T>> d(points.begin(), points.end());
  double scale = 1.0;
  for (int k = 0; k < q; ++k) {
    for (std::size_t j = 0; j + 1 < d.size(); ++j) d[j] = d[j + 1] - d[j];
    d.pop_back();
    scale *= static_cast<double>(n - k);
  }
  return {std::move(d), scale};
}

inline std::pair<std::vector<Vec3>, double> diff_control_points(std::span<const Vec3> points,
                                                                int q) {
  return diff_control_points<double>(points, q);
}

// Value and derivatives 1..max_order at x.
CurveSample bezier_eval(std::span<const Vec3> points, double x, int max_order);

inline CurveSample bezier_eval(const ControlPointSet& points, double x, int max_order) {
  return bezier_eval(std::span<const Vec3>(points.points()), x, max_order);
}

// Bernstein weights tabulated on a fixed grid for every derivative order up
// to max_order. Evaluating a curve on the grid is then a weighted sum over
// forward differences, which works for any scalar type (including duals).
class BasisTable {
 public:
  BasisTable(int degree, std::vector<double> xs, int max_order);

  int degree() const { return degree_; }
  int max_order() const { return max_order_; }
  const std::vector<double>& xs() const { return xs_; }
  std::size_t size() const { return xs_.size(); }

  // Weight of difference point j for derivative order q at grid sample k.
  double weight(int q, std::size_t k, int j) const {
    return weights_[static_cast<std::size_t>(q)][k * static_cast<std::size_t>(degree_ - q + 1) +
                                                 static_cast<std::size_t>(j)];
  }

  // d^q r/dx^q at every grid sample.
  template <typename T>
  std::vector<Vector3<T>> evaluate(std::span<const Vector3<T>> points, int q) const {
    if (static_cast<int>(points.size()) != degree_ + 1) {
      throw DomainError("BasisTable::evaluate: point count does not match degree");
    }
    if (q < 0 || q > max_order_) throw DomainError("BasisTable::evaluate: order not tabulated");
    auto [diff, scale] = diff_control_points<T>(points, q);
    const int m = degree_ - q;
    std::vector<Vector3<T>> out(xs_.size());
    for (std::size_t k = 0; k < xs_.size(); ++k) {
      Vector3<T> acc{T(0.0), T(0.0), T(0.0)};
      for (int j = 0; j <= m; ++j) {
        const double w = scale * weight(q, k, j);
        acc += w * diff[static_cast<std::size_t>(j)];
      }
      out[k] = acc;
    }
    return out;
  }

 private:
  int degree_;
  int max_order_;
  std::vector<double> xs_;
  std::vector<std::vector<double>> weights_;
};

std::vector<double> uniform_grid(std::size_t n);

}  // namespace curveforge::bezier
