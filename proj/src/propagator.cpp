#include "curveforge/propagator.hpp"

#include <algorithm>
#include <cmath>

#include "curveforge/errors.hpp"

namespace curveforge::bench {

using cd = std::complex<double>;

Su2 Su2::operator*(const Su2& b) const {
  Su2 c;
  c.a0 = a0 * b.a0 - (ax * b.ax + ay * b.ay + az * b.az);
  c.ax = a0 * b.ax + b.a0 * ax + (ay * b.az - az * b.ay);
  c.ay = a0 * b.ay + b.a0 * ay + (az * b.ax - ax * b.az);
  c.az = a0 * b.az + b.a0 * az + (ax * b.ay - ay * b.ax);
  return c;
}

Mat2c Su2::matrix() const {
  Mat2c m;
  m << cd(a0, -az), cd(-ay, -ax), cd(ay, -ax), cd(a0, az);
  return m;
}

Su2 Su2::from_matrix(const Mat2c& u) {
  if (!gatemap::is_unitary(u, 1e-10)) throw DomainError("Su2::from_matrix: matrix is not unitary");
  const Mat2c v = u / std::sqrt(u.determinant());
  // v = a0 I - i a.sigma
  Su2 s;
  s.a0 = 0.5 * (v(0, 0) + v(1, 1)).real();
  s.az = -0.5 * (v(0, 0) - v(1, 1)).imag();
  s.ax = -0.5 * (v(0, 1) + v(1, 0)).imag();
  s.ay = 0.5 * (v(1, 0) - v(0, 1)).real();
  return s;
}

Su2 su2_step(double hx, double hy, double hz, double dt) {
  const double h = std::sqrt(hx * hx + hy * hy + hz * hz);
  const double a = 0.5 * h * dt;
  if (h == 0.0) return {};
  // sin(a)/h computed stably for small a.
  const double sc = a < 1e-4 ? 0.5 * dt * (1.0 - a * a / 6.0) : std::sin(a) / h;
  return {std::cos(a), sc * hx, sc * hy, sc * hz};
}

double infidelity(const Su2& u, const Su2& v) {
  const Su2 m = u * v.inverse();
  // |tr m|^2 = 4 a0^2 and 1 - a0^2 = |a|^2.
  return 2.0 / 3.0 * (m.ax * m.ax + m.ay * m.ay + m.az * m.az);
}

namespace {

void check_fields(const ControlFields& f) {
  if (f.t.size() < 2 || f.omega.size() != f.t.size() || f.phi.size() != f.t.size() ||
      f.delta.size() != f.t.size()) {
    throw DomainError("propagate: inconsistent control field arrays");
  }
  for (std::size_t k = 0; k < f.t.size(); ++k) {
    if (!std::isfinite(f.t[k]) || !std::isfinite(f.omega[k]) || !std::isfinite(f.phi[k]) ||
        !std::isfinite(f.delta[k])) {
      throw DomainError("propagate: non-finite field sample");
    }
  }
}

class Stepper {
 public:
  Stepper(const ControlFields& f, const PropagateOptions& o) : f_(f), o_(o) {
    check_fields(f);
    if (o.n_steps + 1 < f.t.size()) {
      throw DomainError("propagate: n_steps must be at least the number of field samples");
    }
    for (double v : o.dz_trace) {
      if (!std::isfinite(v)) throw DomainError("propagate: non-finite noise sample");
    }
  }

  double duration() const { return f_.t.back() - f_.t.front(); }

  // Step over [ta, tb] with fields sampled at the midpoint.
  Su2 step(double ta, double tb) {
    const double tm = 0.5 * (ta + tb);
    while (j_ + 2 < f_.t.size() && f_.t[j_ + 1] <= tm) ++j_;
    while (j_ > 0 && f_.t[j_] > tm) --j_;
    double om = 0.0, ph = 0.0, de = 0.0;
    const std::size_t n = f_.t.size();
    if (f_.nonnegative_omega || n < 4) {
      // |Omega| has kinks and Phi has pi jumps: stay linear
      const double w = std::clamp((tm - f_.t[j_]) / (f_.t[j_ + 1] - f_.t[j_]), 0.0, 1.0);
      om = (1.0 - w) * f_.omega[j_] + w * f_.omega[j_ + 1];
      ph = (1.0 - w) * f_.phi[j_] + w * f_.phi[j_ + 1];
      de = (1.0 - w) * f_.delta[j_] + w * f_.delta[j_ + 1];
    } else {
      const std::size_t lo = std::min(j_ > 0 ? j_ - 1 : 0, n - 4);
      for (std::size_t a = lo; a < lo + 4; ++a) {
        double w = 1.0;
        for (std::size_t b = lo; b < lo + 4; ++b) {
          if (b != a) w *= (tm - f_.t[b]) / (f_.t[a] - f_.t[b]);
        }
        om += w * f_.omega[a];
        ph += w * f_.phi[a];
        de += w * f_.delta[a];
      }
    }
    double dz = o_.noise.delta_z;
    if (!o_.dz_trace.empty()) {
      const double u = (tm - f_.t.front()) / duration();
      auto i = static_cast<std::size_t>(u * static_cast<double>(o_.dz_trace.size()));
      dz += o_.dz_trace[std::min(i, o_.dz_trace.size() - 1)];
    }
    const double a = (1.0 + o_.noise.epsilon) * om;
    return su2_step(a * std::cos(ph), a * std::sin(ph), de + dz, tb - ta);
  }

 private:
  const ControlFields& f_;
  const PropagateOptions& o_;
  std::size_t j_ = 0;
};

}  // namespace

Su2 propagate_su2(const ControlFields& fields, const PropagateOptions& options) {
  Stepper s(fields, options);
  const double t0 = fields.t.front();
  const double dt = s.duration() / static_cast<double>(options.n_steps);
  Su2 u;
  for (std::size_t k = 0; k < options.n_steps; ++k) {
    const double ta = t0 + dt * static_cast<double>(k);
    const double tb = k + 1 == options.n_steps ? fields.t.back() : ta + dt;
    u = s.step(ta, tb) * u;
  }
  return u;
}

Mat2c propagate(const ControlFields& fields, const PropagateOptions& options) {
  return propagate_su2(fields, options).matrix();
}

std::vector<Su2> propagate_path(const ControlFields& fields, std::span<const double> times,
                                const PropagateOptions& options) {
  Stepper s(fields, options);
  const double t0 = fields.t.front();
  const double dt = s.duration() / static_cast<double>(options.n_steps);
  std::vector<Su2> out;
  out.reserve(times.size());
  Su2 u;
  double tcur = t0;
  std::size_t k = 0;
  for (double target : times) {
    if (target < tcur - 1e-15) throw DomainError("propagate_path: times must be ascending");
    while (true) {
      const double next = std::min(t0 + dt * static_cast<double>(k + 1), fields.t.back());
      if (next > target) break;
      u = s.step(tcur, next) * u;
      tcur = next;
      ++k;
      if (k >= options.n_steps) break;
    }
    Su2 partial = u;
    if (target > tcur) partial = s.step(tcur, target) * u;
    out.push_back(partial);
  }
  return out;
}

}  // namespace curveforge::bench
