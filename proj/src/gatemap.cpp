#include "curveforge/gatemap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curveforge/errors.hpp"

namespace curveforge::gatemap {

using std::numbers::pi;
using cd = std::complex<double>;

const Mat2c& pauli(int i) {
  static const Mat2c s[3] = {
      (Mat2c() << 0, 1, 1, 0).finished(),
      (Mat2c() << 0, cd(0, -1), cd(0, 1), 0).finished(),
      (Mat2c() << 1, 0, 0, -1).finished(),
  };
  return s[i];
}

bool is_unitary(const Mat2c& u, double tol) {
  return ((u.adjoint() * u - Mat2c::Identity()).cwiseAbs().maxCoeff() <= tol) && u.allFinite();
}

Mat3 adjoint_of_su2(const Mat2c& u) {
  if (!is_unitary(u, 1e-10)) throw DomainError("adjoint_of_su2: matrix is not unitary");
  Mat3 r;
  const Mat2c ud = u.adjoint();
  for (int i = 0; i < 3; ++i) {
    const Mat2c a = ud * pauli(i) * u;
    for (int j = 0; j < 3; ++j) r(i, j) = 0.5 * (a * pauli(j)).trace().real();
  }
  return r;
}

GateTarget GateTarget::from_unitary(const Mat2c& u) { return {u, adjoint_of_su2(u)}; }

GateTarget named_gate(std::string_view name) {
  if (name == "identity") return GateTarget::from_unitary(Mat2c::Identity());
  if (name == "x") return GateTarget::from_unitary(pauli(0));
  if (name == "y") return GateTarget::from_unitary(pauli(1));
  if (name == "z") return GateTarget::from_unitary(pauli(2));
  if (name == "hadamard") {
    Mat2c h;
    h << 1, 1, 1, -1;
    return GateTarget::from_unitary(h / std::sqrt(2.0));
  }
  throw ConfigError("unknown gate name '" + std::string(name) +
                    "' (expected identity, x, y, z or hadamard)");
}

double gate_fidelity_su2(const Mat2c& m) {
  const double a = (m * m.adjoint()).trace().real();
  const double b = std::norm(m.trace());
  return (a + b) / 6.0;
}

double gate_fidelity_adjoint(const Mat3& rg, const Mat3& r) {
  return (3.0 + (rg.transpose() * r).trace()) / 6.0;
}

Mat3 rz(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

TtcSolution ttc_detuning(double theta_b, int m, double total_torsion, double tg) {
  if (!(tg > 0.0)) throw DomainError("ttc_detuning: T_g must be positive");
  // T_g delta = c + 2 k pi
  const double c = theta_b - static_cast<double>(m + 1) * pi - total_torsion;
  const int k0 = static_cast<int>(std::floor(-c / (2.0 * pi)));
  TtcSolution best;
  bool have = false;
  for (int k = k0 - 1; k <= k0 + 2; ++k) {
    const double v = c + 2.0 * pi * k;
    if (!have) {
      best = {v / tg, v, k};
      have = true;
      continue;
    }
    const double diff = std::abs(v) - std::abs(best.tg_delta);
    const double tol = 1e-12 * std::max(1.0, std::abs(v));
    if (diff < -tol || (std::abs(diff) <= tol && v > best.tg_delta)) best = {v / tg, v, k};
  }
  return best;
}

std::string to_string(ControlMode mode) { return mode == ControlMode::XY ? "xy" : "ttc"; }

ControlMode parse_control_mode(std::string_view s) {
  if (s == "xy" || s == "XY") return ControlMode::XY;
  if (s == "ttc" || s == "TTC") return ControlMode::TTC;
  throw ConfigError("unknown control mode '" + std::string(s) + "' (expected xy or ttc)");
}

std::vector<double> ControlFields::omega_x() const {
  std::vector<double> v(size());
  for (std::size_t k = 0; k < size(); ++k) v[k] = omega[k] * std::cos(phi[k]);
  return v;
}

std::vector<double> ControlFields::omega_y() const {
  std::vector<double> v(size());
  for (std::size_t k = 0; k < size(); ++k) v[k] = omega[k] * std::sin(phi[k]);
  return v;
}

std::vector<double> phase_on_frame(const frenet::FrenetData& fd, double delta) {
  std::vector<double> phi(fd.size());
  for (std::size_t k = 0; k < fd.size(); ++k) {
    phi[k] = fd.samples[k].twist + delta * fd.samples[k].t;
  }
  return phi;
}

std::vector<double> effective_phase(const frenet::FrenetData& fd, const std::vector<double>& phi) {
  std::vector<double> out(phi);
  for (std::size_t k = 0; k < fd.size(); ++k) {
    int passed = 0;
    for (const auto& sp : fd.singular_points) {
      if (fd.samples[k].x >= sp.x) ++passed;
    }
    out[k] += pi * passed;
  }
  return out;
}

ControlFields extract_controls(const frenet::FrenetData& fd, ControlMode mode,
                               std::optional<double> theta_b, const ExtractOptions& options) {
  if (fd.size() < 2) throw DomainError("extract_controls: empty frame");
  ControlFields cf;
  cf.mode = mode;
  cf.tg = fd.total_length;
  double delta = 0.0;
  if (mode == ControlMode::TTC) {
    if (!theta_b) throw ConfigError("TTC mode requires theta_B (no gate context given)");
    const auto sol = ttc_detuning(*theta_b, fd.M(), fd.total_torsion, fd.total_length);
    delta = sol.delta;
    cf.ttc = TtcRecord{*theta_b, fd.M(), fd.total_torsion, sol.k_star, sol.tg_delta};
  }

  const std::vector<double> phi = phase_on_frame(fd, delta);
  if (options.nonnegative_omega) cf.nonnegative_omega = true;

  const std::size_t m = options.samples ? options.samples : fd.size();
  if (m < 2) throw DomainError("extract_controls: need at least 2 output samples");
  cf.t.resize(m);
  cf.omega.resize(m);
  cf.phi.resize(m);
  cf.delta.assign(m, delta);
  const std::size_t n = fd.size();
  const std::size_t width = std::min<std::size_t>(4, n);
  std::size_t j = 0, passed = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = i + 1 == m ? cf.tg : cf.tg * static_cast<double>(i) / static_cast<double>(m - 1);
    while (j + 2 < n && fd.samples[j + 1].t < t) ++j;
    // cubic through the four nearest frame samples (signed kappa and phi are smooth)
    const std::size_t lo = std::min(j > 0 ? j - 1 : 0, n - width);
    double om = 0.0, ph = 0.0;
    for (std::size_t a = lo; a < lo + width; ++a) {
      double w = 1.0;
      for (std::size_t b = lo; b < lo + width; ++b) {
        if (b != a) w *= (t - fd.samples[b].t) / (fd.samples[a].t - fd.samples[b].t);
      }
      om += w * fd.samples[a].kappa;
      ph += w * phi[a];
    }
    cf.t[i] = t;
    if (options.nonnegative_omega) {
      while (passed < fd.singular_points.size() && fd.singular_points[passed].t <= t) ++passed;
      om = std::abs(om);
      ph += pi * static_cast<double>(passed);
    }
    cf.omega[i] = om;
    cf.phi[i] = ph;
  }
  cf.phi[0] = 0.0;
  return cf;
}

Mat3 frame_matrix(const frenet::FrenetSample& s) {
  Mat3 r;
  r << -s.binormal.x, -s.binormal.y, -s.binormal.z, s.normal.x, s.normal.y, s.normal.z,
      s.tangent.x, s.tangent.y, s.tangent.z;
  return r;
}

std::vector<Mat3> predicted_adjoint(const frenet::FrenetData& fd, const std::vector<double>& phi) {
  if (phi.size() != fd.size()) throw DomainError("predicted_adjoint: phase length mismatch");
  std::vector<Mat3> out(fd.size());
  const Mat3 r0t = frame_matrix(fd.samples.front()).transpose();
  for (std::size_t k = 0; k < fd.size(); ++k) {
    out[k] = rz(phi[k]) * frame_matrix(fd.samples[k]) * r0t;
  }
  return out;
}

}  // namespace curveforge::gatemap
