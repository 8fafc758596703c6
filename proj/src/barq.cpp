#include "curveforge/barq.hpp"

#include <cmath>
#include <random>

namespace curveforge::barq {

namespace {

constexpr std::array<std::string_view, kLambdaCount> kNames = {
    "lambda1p", "lambda2", "lambda3p", "lambda3", "lambda_nm3p", "lambda_nm3", "lambda_nm2",
    "lambda_nm1p"};

}  // namespace

std::string_view lambda_name(Lambda l) { return kNames[static_cast<std::size_t>(l)]; }

std::optional<Lambda> parse_lambda_name(std::string_view name) {
  for (int i = 0; i < kLambdaCount; ++i) {
    if (kNames[static_cast<std::size_t>(i)] == name) return static_cast<Lambda>(i);
  }
  return std::nullopt;
}

bool lambda_positive(Lambda l) {
  return l == Lambda::L1p || l == Lambda::L3p || l == Lambda::Lnm3p || l == Lambda::Lnm1p;
}

double lambda_to_raw(Lambda l, double value) {
  return lambda_positive(l) ? std::log(value) : value;
}

LambdaSetting BarqConfig::lambda(Lambda l) const {
  if (const auto& o = overrides[static_cast<std::size_t>(l)]) return *o;
  const bool tied = l == Lambda::L3 || l == Lambda::Lnm3;
  if (pgf == PgfKind::Symmetric) {
    if (tied) return {true, 0.0};
    return {false, nu};
  }
  // General PGF: every scale is optimizable, starting from the symmetric values.
  return {true, tied ? 0.0 : nu};
}

void BarqConfig::validate() const {
  if (n_free < 4) throw ConfigError("n_free must be at least 4 (got " + std::to_string(n_free) + ")");
  if (n_free + 5 > bezier::kMaxDegree) throw ConfigError("n_free too large for the degree cap");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be positive and finite");
  if (!std::isfinite(theta_b)) throw ConfigError("theta_B must be finite");
  for (int i = 0; i < kLambdaCount; ++i) {
    const auto l = static_cast<Lambda>(i);
    const auto s = lambda(l);
    if (!std::isfinite(s.value)) {
      throw ConfigError(std::string(lambda_name(l)) + " must be finite");
    }
    if (lambda_positive(l) && !(s.value > 0.0)) {
      throw ConfigError(std::string(lambda_name(l)) + " must be strictly positive");
    }
  }
  if (!gatemap::is_unitary(target.u, 1e-10)) throw ConfigError("target_unitary is not unitary");
}

ParameterLayout::ParameterLayout(const BarqConfig& config) : n_free_(config.n_free) {
  config.validate();
  std::size_t next = 3 * static_cast<std::size_t>(n_free_);
  lambda_index_.fill(-1);
  for (int i = 0; i < kLambdaCount; ++i) {
    const auto l = static_cast<Lambda>(i);
    if (!config.lambda(l).optimizable) continue;
    if (l == Lambda::Lnm3 && config.tie_l3 && lambda_index_[static_cast<std::size_t>(Lambda::L3)] >= 0) {
      lambda_index_[static_cast<std::size_t>(i)] = lambda_index_[static_cast<std::size_t>(Lambda::L3)];
      continue;
    }
    lambda_index_[static_cast<std::size_t>(i)] = static_cast<int>(next++);
    ++n_lambda_;
  }
  if (config.optimize_theta_b) theta_index_ = static_cast<int>(next++);
  size_ = next;
}

std::vector<double> BarqParameters::flatten(const ParameterLayout& layout) const {
  std::vector<double> v(layout.size());
  for (int i = 0; i < layout.n_free(); ++i) {
    const auto o = layout.point_offset(i);
    const Vec3& p = free_points.at(static_cast<std::size_t>(i));
    v[o] = p.x;
    v[o + 1] = p.y;
    v[o + 2] = p.z;
  }
  const std::size_t base = 3 * static_cast<std::size_t>(layout.n_free());
  for (std::size_t i = 0; i < layout.n_lambda_params(); ++i) v[base + i] = lambda_raw.at(i);
  if (layout.theta_index() >= 0) v[static_cast<std::size_t>(layout.theta_index())] = theta_b;
  return v;
}

BarqParameters BarqParameters::unflatten(std::span<const double> v, const ParameterLayout& layout,
                                         const BarqConfig& config) {
  if (v.size() != layout.size()) throw DomainError("parameter vector has the wrong length");
  BarqParameters p;
  for (int i = 0; i < layout.n_free(); ++i) {
    const auto o = layout.point_offset(i);
    p.free_points.push_back({v[o], v[o + 1], v[o + 2]});
  }
  const std::size_t base = 3 * static_cast<std::size_t>(layout.n_free());
  p.lambda_raw.assign(v.begin() + static_cast<std::ptrdiff_t>(base),
                      v.begin() + static_cast<std::ptrdiff_t>(base + layout.n_lambda_params()));
  p.theta_b = layout.theta_index() >= 0 ? v[static_cast<std::size_t>(layout.theta_index())]
                                        : config.theta_b;
  return p;
}

BarqParameters initial_parameters(const BarqConfig& config, std::vector<Vec3> free_points) {
  const ParameterLayout layout(config);
  if (free_points.size() != static_cast<std::size_t>(config.n_free)) {
    throw ConfigError("free_points must contain n_free = " + std::to_string(config.n_free) +
                      " points");
  }
  BarqParameters p;
  p.free_points = std::move(free_points);
  p.lambda_raw.assign(layout.n_lambda_params(), 0.0);
  const std::size_t base = 3 * static_cast<std::size_t>(config.n_free);
  for (int i = 0; i < kLambdaCount; ++i) {
    const auto l = static_cast<Lambda>(i);
    const int idx = layout.lambda_index(l);
    if (idx >= 0) {
      p.lambda_raw[static_cast<std::size_t>(idx) - base] = lambda_to_raw(l, config.lambda(l).value);
    }
  }
  p.theta_b = config.theta_b;
  return p;
}

BarqParameters random_parameters(const BarqConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto draw = [&] { return Vec3{u(rng), u(rng), u(rng)}; };
  std::vector<Vec3> pts;
  pts.push_back(draw());
  while (norm(pts[0]) < 1e-3) pts[0] = draw();
  Vec3 p2 = draw();
  while (norm(p2) < 1e-3 || std::abs(dot(normalized(pts[0]), normalized(p2))) > 0.999) p2 = draw();
  pts.push_back(p2);
  for (int i = 2; i < config.n_free; ++i) pts.push_back(draw());
  return initial_parameters(config, std::move(pts));
}

Mat3 initial_frame_rb0(const Vec3& p1, const Vec3& p2) {
  const auto rows = initial_frame_rows(p1, p2);
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = rows[static_cast<std::size_t>(i)][j];
  }
  return r;
}

bezier::ControlPointSet build_control_points(const BarqParameters& params, const BarqConfig& config) {
  const ParameterLayout layout(config);
  const auto v = params.flatten(layout);
  return bezier::ControlPointSet(build_control_points<double>(std::span<const double>(v), layout, config));
}

double verify_gate_encoding(const bezier::ControlPointSet& points, const Mat3& rg, double theta_b) {
  const auto& w = points.points();
  const std::size_t n = w.size() - 1;
  const Mat3 rb0 = initial_frame_rb0(w[1], w[3]);
  const Vec3 t_end = -normalized(w[n - 1]);
  const Vec3 c = cross(w[n - 1], w[n - 3]);
  if (!(norm(c) > kMinFrameAngle * norm(w[n - 1]) * norm(w[n - 3]))) {
    throw FrameUndefinedError("degenerate frame: w_{n-1} is parallel to w_{n-3}");
  }
  const Vec3 b = normalized(c);
  const Vec3 nrm = cross(b, t_end);
  Mat3 rbt;
  rbt << -b.x, -b.y, -b.z, nrm.x, nrm.y, nrm.z, t_end.x, t_end.y, t_end.z;
  const Mat3 expect = gatemap::rz(theta_b).transpose() * rg * rb0;
  return (rbt - expect).cwiseAbs().maxCoeff();
}

}  // namespace curveforge::barq
