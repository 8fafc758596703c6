#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "curveforge/frenet.hpp"

namespace curveforge::gatemap {

using Mat2c = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3d;

// Pauli matrices sigma_x, sigma_y, sigma_z (index 0..2).
const Mat2c& pauli(int i);

struct GateTarget {
  Mat2c u;
  Mat3 adjoint;

  static GateTarget from_unitary(const Mat2c& u);
};

// identity, x, y, z, hadamard
GateTarget named_gate(std::string_view name);

// R^{ij} = tr(u^dag s_i u s_j)/2.
Mat3 adjoint_of_su2(const Mat2c& u);

// (tr(m m^dag) + |tr m|^2)/6 for m = U U_g^dag.
double gate_fidelity_su2(const Mat2c& m);
inline double gate_fidelity_su2(const Mat2c& u, const Mat2c& target) {
  return gate_fidelity_su2(Mat2c(u * target.adjoint()));
}

// (3 + tr(R_g^T R))/6.
double gate_fidelity_adjoint(const Mat3& rg, const Mat3& r);

// Counterclockwise rotation about z.
Mat3 rz(double angle);

struct TtcSolution {
  double delta = 0.0;     // rad/time
  double tg_delta = 0.0;  // T_g * delta
  int k_star = 0;
};

TtcSolution ttc_detuning(double theta_b, int m, double total_torsion, double tg);

enum class ControlMode { XY, TTC };

std::string to_string(ControlMode mode);
ControlMode parse_control_mode(std::string_view s);

struct TtcRecord {
  double theta_b = 0.0;
  int m = 0;
  double total_torsion = 0.0;
  int k_star = 0;
  double tg_delta = 0.0;
};

struct ControlFields {
  std::vector<double> t;
  std::vector<double> omega;
  std::vector<double> phi;
  std::vector<double> delta;
  ControlMode mode = ControlMode::XY;
  std::optional<TtcRecord> ttc;
  double tg = 0.0;
  // Set when omega is reported nonnegative with pi jumps folded into phi.
  bool nonnegative_omega = false;

  std::size_t size() const { return t.size(); }
  std::vector<double> omega_x() const;
  std::vector<double> omega_y() const;
};

struct ExtractOptions {
  // Uniform time samples in the output; 0 keeps the frame grid size.
  std::size_t samples = 0;
  bool nonnegative_omega = false;
};

ControlFields extract_controls(const frenet::FrenetData& fd, ControlMode mode,
                               std::optional<double> theta_b, const ExtractOptions& options = {});

// Phase on the frame samples: cumulative torsion plus delta * t.
std::vector<double> phase_on_frame(const frenet::FrenetData& fd, double delta);

// Phi + pi per singular point already passed (frame samples).
std::vector<double> effective_phase(const frenet::FrenetData& fd, const std::vector<double>& phi);

// R_Z(Phi(t)) R_F(t) R_F(0)^T at every frame sample, with the continuous
// frame and signed curvature. phi is given on the frame samples.
std::vector<Mat3> predicted_adjoint(const frenet::FrenetData& fd, const std::vector<double>& phi);

Mat3 frame_matrix(const frenet::FrenetSample& s);

bool is_unitary(const Mat2c& u, double tol);

}  // namespace curveforge::gatemap
