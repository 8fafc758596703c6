#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "curveforge/gatemap.hpp"

namespace curveforge::bench {

using gatemap::ControlFields;
using gatemap::Mat2c;

// SU(2) element a0 I - i (a . sigma), kept as four reals so that tiny
// infidelities are read off |a|^2 without cancellation.
struct Su2 {
  double a0 = 1.0;
  double ax = 0.0, ay = 0.0, az = 0.0;

  static Su2 from_matrix(const Mat2c& u);  // global phase removed
  Mat2c matrix() const;
  Su2 inverse() const { return {a0, -ax, -ay, -az}; }
  Su2 operator*(const Su2& b) const;
};

// exp(-i (h . sigma) dt / 2)
Su2 su2_step(double hx, double hy, double hz, double dt);

// 1 - F for the phase-invariant average gate fidelity of U against V.
double infidelity(const Su2& u, const Su2& v);

struct StaticNoise {
  double epsilon = 0.0;  // multiplicative drive error
  double delta_z = 0.0;  // additive dephasing, rad/time
};

struct PropagateOptions {
  std::size_t n_steps = 4096;
  StaticNoise noise;
  // Optional dephasing trace on a uniform grid over [0, T_g), zero-order hold.
  std::span<const double> dz_trace;
};

Su2 propagate_su2(const ControlFields& fields, const PropagateOptions& options = {});
Mat2c propagate(const ControlFields& fields, const PropagateOptions& options = {});

// Propagator evaluated at each requested time (ascending, within [0, T_g]).
std::vector<Su2> propagate_path(const ControlFields& fields, std::span<const double> times,
                                const PropagateOptions& options = {});

}  // namespace curveforge::bench
