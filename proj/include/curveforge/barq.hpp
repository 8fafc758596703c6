#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curveforge/bezier.hpp"
#include "curveforge/dual.hpp"
#include "curveforge/errors.hpp"
#include "curveforge/gatemap.hpp"
#include "curveforge/vec3.hpp"

namespace curveforge::barq {

using gatemap::GateTarget;
using gatemap::Mat3;

enum class PgfKind { Symmetric, General };

// Scale parameters of the gate-fixing points. "p" marks the strictly
// positive ones.
enum class Lambda { L1p, L2, L3p, L3, Lnm3p, Lnm3, Lnm2, Lnm1p };
inline constexpr int kLambdaCount = 8;

std::string_view lambda_name(Lambda l);
std::optional<Lambda> parse_lambda_name(std::string_view name);
bool lambda_positive(Lambda l);

struct LambdaSetting {
  bool optimizable = false;
  double value = 0.0;  // fixed value, or initial value when optimizable
};

struct BarqConfig {
  GateTarget target = gatemap::named_gate("identity");
  int n_free = 10;
  double theta_b = 0.0;
  bool optimize_theta_b = false;
  double nu = 0.25;
  PgfKind pgf = PgfKind::Symmetric;
  std::array<std::optional<LambdaSetting>, kLambdaCount> overrides{};
  // lambda_3 and lambda_{n-3} share one parameter when both are optimizable.
  bool tie_l3 = true;

  void validate() const;
  // Setting per slot after applying PGF defaults and overrides.
  LambdaSetting lambda(Lambda l) const;
  int degree() const { return n_free + 5; }
};

// Positions of the free parameters in a flat optimization vector:
// [p_1 .. p_N (3N values)] [raw lambdas] [theta_B]
class ParameterLayout {
 public:
  explicit ParameterLayout(const BarqConfig& config);

  std::size_t size() const { return size_; }
  int n_free() const { return n_free_; }
  std::size_t point_offset(int i) const { return 3 * static_cast<std::size_t>(i); }
  // -1 for fixed slots.
  int lambda_index(Lambda l) const { return lambda_index_[static_cast<std::size_t>(l)]; }
  int theta_index() const { return theta_index_; }
  std::size_t n_lambda_params() const { return n_lambda_; }

 private:
  int n_free_;
  std::array<int, kLambdaCount> lambda_index_{};
  std::size_t n_lambda_ = 0;
  int theta_index_ = -1;
  std::size_t size_ = 0;
};

struct BarqParameters {
  std::vector<Vec3> free_points;
  std::vector<double> lambda_raw;  // unconstrained; exp() for positive slots
  double theta_b = 0.0;

  std::vector<double> flatten(const ParameterLayout& layout) const;
  static BarqParameters unflatten(std::span<const double> v, const ParameterLayout& layout,
                                  const BarqConfig& config);
};

// Raw value for an initial lambda: log for positive slots.
double lambda_to_raw(Lambda l, double value);

// Free points uniform in [-1,1]^3; p_2 redrawn until p_1 and p_2 are far from parallel.
BarqParameters random_parameters(const BarqConfig& config, std::uint64_t seed);
BarqParameters initial_parameters(const BarqConfig& config, std::vector<Vec3> free_points);

inline constexpr double kMinFrameAngle = 1e-6;

// Rows (-B(0), N(0), T(0)) from the first two free points.
template <typename T>
std::array<Vector3<T>, 3> initial_frame_rows(const Vector3<T>& p1, const Vector3<T>& p2) {
  const Vector3<T> t = normalized(p1);
  const Vector3<T> c = cross(t, normalized(p2));
  const double s = value_of(norm(c));
  if (!(s > kMinFrameAngle)) {
    throw FrameUndefinedError("degenerate frame: p1 and p2 are parallel, R_B(0) is undefined");
  }
  const Vector3<T> b = c / norm(c);
  const Vector3<T> nrm = cross(b, t);
  return {-b, nrm, t};
}

Mat3 initial_frame_rb0(const Vec3& p1, const Vec3& p2);

// Control points w_0..w_n, generic over the scalar type so the optimizer
// can push dual numbers through the construction.
template <typename T>
std::vector<Vector3<T>> build_control_points(std::span<const T> v, const ParameterLayout& layout,
                                             const BarqConfig& config) {
  using std::cos;
  using std::exp;
  using std::sin;
  const int nf = layout.n_free();
  auto point = [&](int i) {
    const std::size_t o = layout.point_offset(i);
    return Vector3<T>{v[o], v[o + 1], v[o + 2]};
  };
  auto lam = [&](Lambda l) -> T {
    const int idx = layout.lambda_index(l);
    if (idx < 0) return T(config.lambda(l).value);
    const T raw = v[static_cast<std::size_t>(idx)];
    return lambda_positive(l) ? exp(raw) : raw;
  };
  const T theta = layout.theta_index() >= 0 ? v[static_cast<std::size_t>(layout.theta_index())]
                                            : T(config.theta_b);

  const Vector3<T> p1 = point(0), p2 = point(1);
  const auto rb0 = initial_frame_rows(p1, p2);
  const Vector3<T> p1h = normalized(p1), p2h = normalized(p2);
  // a_i = rows of R_g R_B(0)
  std::array<Vector3<T>, 3> a;
  const Mat3& rg = config.target.adjoint;
  for (int i = 0; i < 3; ++i) {
    Vector3<T> acc{T(0.0), T(0.0), T(0.0)};
    for (int j = 0; j < 3; ++j) acc += rg(i, j) * rb0[static_cast<std::size_t>(j)];
    a[static_cast<std::size_t>(i)] = acc;
  }

  std::vector<Vector3<T>> w;
  w.reserve(static_cast<std::size_t>(nf) + 6);
  const Vector3<T> zero{T(0.0), T(0.0), T(0.0)};
  w.push_back(zero);
  w.push_back(lam(Lambda::L1p) * p1h);
  w.push_back(lam(Lambda::L2) * p1h);
  w.push_back(lam(Lambda::L3p) * p2h + lam(Lambda::L3) * p1h);
  for (int i = 2; i < nf; ++i) w.push_back(point(i));
  w.push_back(lam(Lambda::Lnm3p) * (sin(theta) * a[0] - cos(theta) * a[1]) -
              lam(Lambda::Lnm3) * a[2]);
  w.push_back(-(lam(Lambda::Lnm2) * a[2]));
  w.push_back(-(lam(Lambda::Lnm1p) * a[2]));
  w.push_back(zero);
  return w;
}

bezier::ControlPointSet build_control_points(const BarqParameters& params, const BarqConfig& config);

// max |R_B(T_g) - R_Z^T(theta_B) R_g R_B(0)| with both frames read off the
// endpoint control points.
double verify_gate_encoding(const bezier::ControlPointSet& points, const Mat3& rg, double theta_b);

}  // namespace curveforge::barq
