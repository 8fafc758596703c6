#include "curveforge/frenet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curveforge/errors.hpp"

namespace curveforge::frenet {

namespace {

constexpr double kGaussX[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGaussW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// Sine threshold for "this higher-order cross product does not vanish".
constexpr double kOrderTolerance = 1e-8;

struct Local {
  double x = 0.0;
  std::vector<Vec3> d;  // r, r', r'', ...
  double gamma = 0.0;
  Vec3 bu;  // unsigned binormal, right-side limit unless asked otherwise
  double kappa = 0.0;
  double tau = 0.0;
  int order = 0;
};

class Evaluator {
 public:
  Evaluator(const Curve& c, double threshold) : curve_(c), threshold_(threshold) {}

  void set_scale(double s) { scale_ = s; }

  static double cross_ratio(const std::vector<Vec3>& d) {
    const double g2 = squared_norm(d[1]);
    return norm(cross(d[1], d[2])) / g2;
  }

  std::vector<Vec3> derivatives(double x, int q) const {
    auto d = curve_.eval(x, std::min(q, curve_.max_order));
    if (d.size() < 3) throw FrameUndefinedError("curve must provide at least two derivatives");
    return d;
  }

  // left_limit selects the one-sided limit from below at an inflection.
  // Bisection points (strict = false) fall back to higher orders only on an
  // exact zero, so a flip is never attributed to a point beside the node.
  Local at(double x, bool left_limit = false, bool strict = true) const {
    Local l;
    l.x = x;
    l.d = derivatives(x, 3);
    l.gamma = norm(l.d[1]);
    const Vec3 c0 = cross(l.d[1], l.d[2]);
    const double c0n = norm(c0);
    l.kappa = c0n / (l.gamma * l.gamma * l.gamma);
    const bool regular = strict ? c0n / (l.gamma * l.gamma) > threshold_ * scale_ : c0n > 0.0;
    if (regular && c0n > 0.0) {
      l.bu = c0 / c0n;
      l.tau = l.d.size() > 3 ? dot(c0, l.d[3]) / (c0n * c0n) : 0.0;
      return l;
    }
    auto full = derivatives(x, curve_.max_order);
    for (int q = 1; q + 2 < static_cast<int>(full.size()); ++q) {
      const Vec3& dq = full[static_cast<std::size_t>(q + 2)];
      const double dn = norm(dq);
      if (dn == 0.0) continue;
      const Vec3 cq = cross(full[1], dq);
      const double cn = norm(cq);
      if (cn <= kOrderTolerance * l.gamma * dn) continue;
      l.order = q;
      l.bu = cq / cn;
      if (left_limit && (q % 2 == 1)) l.bu = -l.bu;
      const std::size_t k3 = static_cast<std::size_t>(q + 3);
      l.tau = k3 < full.size() ? dot(cq, full[k3]) / (cn * cn * static_cast<double>(q + 1)) : 0.0;
      return l;
    }
    throw FrameUndefinedError("Frenet frame undefined at x = " + std::to_string(x) +
                              ": every available derivative is parallel to the tangent");
  }

  // Lowest order l >= 1 with r' x d^(l+2)r not parallel-vanishing at x.
  int scan_order(double x) const {
    auto full = derivatives(x, curve_.max_order);
    const double g = norm(full[1]);
    for (int q = 1; q + 2 < static_cast<int>(full.size()); ++q) {
      const Vec3& dq = full[static_cast<std::size_t>(q + 2)];
      const double dn = norm(dq);
      if (dn == 0.0) continue;
      if (norm(cross(full[1], dq)) > 1e-6 * g * dn) return q;
    }
    return 1;
  }

 private:
  const Curve& curve_;
  double threshold_;
  double scale_ = 0.0;
};

// Bisects [a, b] until consecutive binormals turn by less than the step
// angle, appending the interior points and b to path.
void refine(const Evaluator& ev, const Local& a, const Local& b, double cos_max, int depth,
            std::vector<Local>& path) {
  if (depth <= 0 || dot(a.bu, b.bu) >= cos_max) {
    path.push_back(b);
    return;
  }
  const Local m = ev.at(0.5 * (a.x + b.x), false, false);
  refine(ev, a, m, cos_max, depth - 1, path);
  refine(ev, m, b, cos_max, depth - 1, path);
}

}  // namespace

Curve make_bezier_curve(const bezier::ControlPointSet& points) {
  Curve c;
  c.max_order = points.degree();
  c.eval = [pts = points.points()](double x, int q) {
    auto s = bezier::bezier_eval(std::span<const Vec3>(pts), x, q);
    std::vector<Vec3> out;
    out.reserve(s.derivatives.size() + 1);
    out.push_back(s.value);
    out.insert(out.end(), s.derivatives.begin(), s.derivatives.end());
    return out;
  };
  return c;
}

FrenetData evaluate_frenet(const Curve& curve, const FrenetOptions& options) {
  if (options.grid_size < 3) throw DomainError("evaluate_frenet: grid_size must be at least 3");
  if (curve.max_order < 2) throw DomainError("evaluate_frenet: curve needs second derivatives");
  const auto xs = bezier::uniform_grid(options.grid_size);
  const std::size_t n = xs.size();

  Evaluator ev(curve, options.inflection_threshold);

  // Pass 1: speed and curvature scale over the grid.
  std::vector<std::vector<Vec3>> ders(n);
  double gmin = INFINITY, gsum = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    ders[k] = ev.derivatives(xs[k], 3);
    for (const auto& v : ders[k]) {
      if (!all_finite(v)) throw DomainError("evaluate_frenet: non-finite curve sample");
    }
    const double g = norm(ders[k][1]);
    gmin = std::min(gmin, g);
    gsum += g;
    if (g > 0.0) scale = std::max(scale, Evaluator::cross_ratio(ders[k]));
  }
  const double gmean = gsum / static_cast<double>(n);
  if (!(gmin > options.regularity_threshold * gmean)) {
    throw RegularityError("curve is not regular: minimum speed " + std::to_string(gmin) +
                          " against mean " + std::to_string(gmean));
  }
  if (!(scale > 0.0)) {
    throw FrameUndefinedError("curve has no curvature anywhere on the grid");
  }
  ev.set_scale(scale);

  std::vector<Local> nodes(n);
  for (std::size_t k = 0; k < n; ++k) nodes[k] = ev.at(xs[k], k + 1 == n);

  FrenetData fd;
  fd.samples.resize(n);
  const double cos_max = std::cos(options.max_step_angle);
  int f = 1;
  double t = 0.0, twist = 0.0;
  std::vector<Local> path;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      const Local& a = nodes[k - 1];
      const Local& b = nodes[k];
      const double h = b.x - a.x;
      path.clear();
      path.push_back(a);
      refine(ev, a, b, cos_max, options.max_refine_depth, path);
      // 3-point Gauss-Legendre for the arclength, and for the twist on
      // intervals that needed no bisection and hold no inflection node
      const bool tame = path.size() == 2 && a.order == 0 && b.order == 0;
      const double c = 0.5 * (a.x + b.x);
      double seg = 0.0, tw = 0.0;
      for (int g = 0; g < 3; ++g) {
        const double xg = c + 0.5 * h * kGaussX[g];
        if (tame) {
          const Local l = ev.at(xg, false, false);
          seg += kGaussW[g] * l.gamma;
          tw += kGaussW[g] * l.tau * l.gamma;
        } else {
          seg += kGaussW[g] * norm(ev.derivatives(xg, 2)[1]);
        }
      }
      const double t_prev = t;
      t += 0.5 * h * seg;
      const bool gauss_twist = tame && std::isfinite(tw);
      if (gauss_twist) twist += 0.5 * h * tw;
      for (std::size_t i = 1; i < path.size(); ++i) {
        const Local& p = path[i - 1];
        const Local& q = path[i];
        if (!gauss_twist) {
          twist += 0.5 * (q.x - p.x) * (p.tau * p.gamma + q.tau * q.gamma);
        }
        if (dot(p.bu, q.bu) < 0.0) {
          f = -f;
          SingularPoint sp;
          // A flip onto an inflection node is placed at the node.
          sp.x = q.order > 0 ? q.x : 0.5 * (p.x + q.x);
          const double gs = norm(ev.derivatives(sp.x, 2)[1]);
          sp.t = t_prev + 0.5 * (sp.x - a.x) * (a.gamma + gs);
          sp.order = ev.scan_order(sp.x);
          fd.singular_points.push_back(sp);
        }
      }
    }
    const Local& l = nodes[k];
    FrenetSample& s = fd.samples[k];
    s.x = l.x;
    s.t = t;
    s.position = l.d[0];
    s.gamma = l.gamma;
    s.tangent = l.d[1] / l.gamma;
    s.binormal = static_cast<double>(f) * l.bu;
    s.normal = cross(s.binormal, s.tangent);
    s.kappa = static_cast<double>(f) * l.kappa;
    s.tau = l.tau;
    s.switching = f;
    s.inflection_order = l.order;
    s.twist = twist;
  }
  fd.samples.front().t = 0.0;
  fd.total_length = t;
  fd.total_torsion = twist;
  return fd;
}

std::vector<InflectionEntry> classify_inflections(const FrenetData& fd) {
  std::vector<InflectionEntry> out;
  const double tol = 1e-9;
  for (const auto& s : fd.samples) {
    if (s.inflection_order == 0) continue;
    const bool interior = s.x > 0.0 && s.x < 1.0;
    const bool singular =
        interior && std::any_of(fd.singular_points.begin(), fd.singular_points.end(),
                                [&](const SingularPoint& p) { return std::abs(p.x - s.x) < tol; });
    out.push_back({s.x, s.t, s.inflection_order, singular});
  }
  for (const auto& p : fd.singular_points) {
    const bool on_node = std::any_of(out.begin(), out.end(), [&](const InflectionEntry& e) {
      return std::abs(e.x - p.x) < tol;
    });
    if (!on_node) out.push_back({p.x, p.t, p.order, true});
  }
  std::sort(out.begin(), out.end(),
            [](const InflectionEntry& a, const InflectionEntry& b) { return a.x < b.x; });
  return out;
}

Vec3 tangent_area(const FrenetData& fd, std::size_t first, std::size_t last) {
  if (last >= fd.samples.size() || first > last) {
    throw DomainError("tangent_area: sample range out of bounds");
  }
  Vec3 acc;
  for (std::size_t k = first + 1; k <= last; ++k) {
    const auto& a = fd.samples[k - 1];
    const auto& b = fd.samples[k];
    // (r' x r'')/gamma^2 = kappa * gamma * B, independent of the sign convention.
    const Vec3 ia = a.kappa * a.gamma * a.binormal;
    const Vec3 ib = b.kappa * b.gamma * b.binormal;
    acc += (0.5 * (b.x - a.x)) * (ia + ib);
  }
  return acc;
}

RobustnessMeasures robustness_measures(const FrenetData& fd) {
  RobustnessMeasures m;
  if (fd.samples.empty()) return m;
  m.closure_gap = norm(fd.samples.back().position - fd.samples.front().position);
  m.tangent_area = tangent_area(fd, 0, fd.samples.size() - 1);
  double acc = 0.0;
  for (std::size_t k = 1; k < fd.samples.size(); ++k) {
    const auto& a = fd.samples[k - 1];
    const auto& b = fd.samples[k];
    acc += 0.5 * (b.x - a.x) *
           (squared_norm(a.position) * a.gamma + squared_norm(b.position) * b.gamma);
  }
  const double tg = fd.total_length;
  m.cfi = acc / (tg * tg * tg);
  return m;
}

FrameRows frame_rows(const FrenetSample& s) { return {-s.binormal, s.normal, s.tangent}; }

}  // namespace curveforge::frenet
