#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "curveforge/bezier.hpp"
#include "curveforge/vec3.hpp"

namespace curveforge::frenet {

// A regular parametric curve on x in [0,1]. eval(x, q) returns
// {r, r', ..., d^q r/dx^q}; max_order bounds the available derivatives.
struct Curve {
  std::function<std::vector<Vec3>(double x, int max_order)> eval;
  int max_order = 3;
};

Curve make_bezier_curve(const bezier::ControlPointSet& points);

struct FrenetSample {
  double x = 0.0;
  double t = 0.0;  // arclength, i.e. time
  Vec3 position;
  Vec3 tangent;
  Vec3 normal;
  Vec3 binormal;
  double kappa = 0.0;  // signed curvature
  double tau = 0.0;
  double gamma = 0.0;  // speed |dr/dx|
  int switching = 1;   // f(t) = +-1
  // 0 at regular samples, otherwise the lowest order l with a nonvanishing
  // r' x d^(l+2)r/dx^(l+2) (inflection sample).
  int inflection_order = 0;
  // Cumulative torsion integral from t = 0 to this sample.
  double twist = 0.0;
};

struct SingularPoint {
  double x = 0.0;
  double t = 0.0;
  int order = 1;
};

struct FrenetOptions {
  std::size_t grid_size = 2049;
  // Inflection when |r' x r''|/gamma^2 falls below this fraction of its grid maximum.
  double inflection_threshold = 1e-8;
  // Regular when the minimum speed exceeds this fraction of the mean speed.
  double regularity_threshold = 1e-9;
  // Intervals where the binormal turns by more than this angle are bisected
  // before the switching function and torsion integral are updated.
  double max_step_angle = 0.1;
  int max_refine_depth = 40;
};

struct FrenetData {
  std::vector<FrenetSample> samples;
  double total_length = 0.0;
  double total_torsion = 0.0;
  std::vector<SingularPoint> singular_points;

  int M() const { return static_cast<int>(singular_points.size()); }
  std::size_t size() const { return samples.size(); }
};

FrenetData evaluate_frenet(const Curve& curve, const FrenetOptions& options = {});

struct InflectionEntry {
  double x = 0.0;
  double t = 0.0;
  int order = 0;
  bool singular = false;
};

// Inflection samples (including curve endpoints) and located singular points,
// ordered by x.
std::vector<InflectionEntry> classify_inflections(const FrenetData& fd);

struct RobustnessMeasures {
  double closure_gap = 0.0;
  Vec3 tangent_area;
  double cfi = 0.0;
};

RobustnessMeasures robustness_measures(const FrenetData& fd);

// Trapezoid integral of (r' x r'')/gamma^2 dx over samples [first, last].
Vec3 tangent_area(const FrenetData& fd, std::size_t first, std::size_t last);

// Rows (-B, N, T) of the frame at a sample.
struct FrameRows {
  Vec3 minus_binormal, normal, tangent;
};
FrameRows frame_rows(const FrenetSample& s);

}  // namespace curveforge::frenet
