#pragma once

#include <cstdint>
#include <random>

#include "curveforge/barq.hpp"
#include "curveforge/frenet.hpp"
#include "curveforge/gatemap.hpp"
#include "curveforge/propagator.hpp"

namespace support {

using namespace curveforge;

inline gatemap::Mat2c random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  double a[4];
  double s = 0;
  for (double& v : a) {
    v = n(rng);
    s += v * v;
  }
  s = std::sqrt(s);
  bench::Su2 q{a[0] / s, a[1] / s, a[2] / s, a[3] / s};
  return q.matrix();
}

struct Design {
  barq::BarqConfig config;
  bezier::ControlPointSet points;
  frenet::FrenetData fd;
};

inline Design barq_design(const std::string& gate, std::uint64_t seed, double nu = 0.25,
                          double theta_b = 0.0, std::size_t grid = 2049) {
  Design d;
  d.config.target = gatemap::named_gate(gate);
  d.config.nu = nu;
  d.config.theta_b = theta_b;
  d.points = barq::build_control_points(barq::random_parameters(d.config, seed), d.config);
  frenet::FrenetOptions o;
  o.grid_size = grid;
  d.fd = frenet::evaluate_frenet(frenet::make_bezier_curve(d.points), o);
  return d;
}

// Propagation on a step 16x finer than the field samples.
inline bench::Su2 final_unitary(const gatemap::ControlFields& f, std::size_t factor = 16) {
  bench::PropagateOptions o;
  o.n_steps = factor * f.size();
  return bench::propagate_su2(f, o);
}

inline double infidelity_to(const bench::Su2& u, const gatemap::Mat2c& target) {
  return bench::infidelity(u, bench::Su2::from_matrix(target));
}

}  // namespace support
