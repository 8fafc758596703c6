#include "curveforge/bezier.hpp"

#include <cmath>
#include <string>

namespace curveforge::bezier {

namespace {

void check_parameter(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("Bezier parameter outside [0,1]: " + std::to_string(x));
  }
}

void check_degree(int n) {
  if (n < 0) throw DomainError("negative Bezier degree");
  if (n > kMaxDegree) {
    throw DomainError("Bezier degree " + std::to_string(n) + " exceeds the supported maximum of " +
                      std::to_string(kMaxDegree));
  }
}

}  // namespace

ControlPointSet::ControlPointSet(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.size() < 4) {
    throw DomainError("control point set needs at least 4 points (degree >= 3)");
  }
  check_degree(degree());
  for (const auto& p : points_) {
    if (!all_finite(p)) throw DomainError("control point set contains a non-finite coordinate");
  }
}

void bernstein_basis_into(int n, double x, std::span<double> out) {
  // Degree elevation recurrence: g_{j,k} = (1-x) g_{j,k-1} + x g_{j-1,k-1}.
  const double u = 1.0 - x;
  out[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double prev = 0.0;
    for (int j = 0; j < k; ++j) {
      const double cur = out[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(j)] = u * cur + x * prev;
      prev = cur;
    }
    out[static_cast<std::size_t>(k)] = x * prev;
  }
}

std::vector<double> bernstein_basis(int n, double x) {
  check_degree(n);
  check_parameter(x);
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  bernstein_basis_into(n, x, g);
  return g;
}

CurveSample bezier_eval(std::span<const Vec3> points, double x, int max_order) {
  if (points.empty()) throw DomainError("bezier_eval: no control points");
  const int n = static_cast<int>(points.size()) - 1;
  check_degree(n);
  check_parameter(x);
  if (max_order < 0 || max_order > n) {
    throw DomainError("bezier_eval: derivative order exceeds degree");
  }

  CurveSample s;
  s.x = x;
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  std::vector<Vec3> diff(points.begin(), points.end());
  double scale = 1.0;
  for (int q = 0; q <= max_order; ++q) {
    if (q > 0) {
      for (std::size_t j = 0; j + 1 < diff.size(); ++j) diff[j] = diff[j + 1] - diff[j];
      diff.pop_back();
      scale *= static_cast<double>(n - q + 1);
    }
    const int m = n - q;
    Vec3 acc;
    // Endpoints reduce to a single difference point exactly.
    if (x == 0.0) {
      acc = diff.front();
    } else if (x == 1.0) {
      acc = diff.back();
    } else {
      bernstein_basis_into(m, x, g);
      for (int j = 0; j <= m; ++j) acc += g[static_cast<std::size_t>(j)] * diff[static_cast<std::size_t>(j)];
    }
    acc *= scale;
    if (q == 0) {
      s.value = acc;
    } else {
      s.derivatives.push_back(acc);
    }
  }
  return s;
}

BasisTable::BasisTable(int degree, std::vector<double> xs, int max_order)
    : degree_(degree), max_order_(max_order), xs_(std::move(xs)) {
  check_degree(degree_);
  if (max_order_ < 0 || max_order_ > degree_) {
    throw DomainError("BasisTable: derivative order exceeds degree");
  }
  weights_.resize(static_cast<std::size_t>(max_order_) + 1);
  for (int q = 0; q <= max_order_; ++q) {
    const int m = degree_ - q;
    auto& w = weights_[static_cast<std::size_t>(q)];
    w.resize(xs_.size() * static_cast<std::size_t>(m + 1));
    for (std::size_t k = 0; k < xs_.size(); ++k) {
      check_parameter(xs_[k]);
      bernstein_basis_into(m, xs_[k],
                           std::span<double>(w).subspan(k * static_cast<std::size_t>(m + 1),
                                                        static_cast<std::size_t>(m + 1)));
    }
  }
}

std::vector<double> uniform_grid(std::size_t n) {
  if (n < 2) throw DomainError("uniform_grid needs at least 2 samples");
  std::vector<double> xs(n);
  const double h = 1.0 / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) xs[k] = static_cast<double>(k) * h;
  xs.back() = 1.0;
  return xs;
}

}  // namespace curveforge::bezier
