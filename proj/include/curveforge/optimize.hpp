#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "curveforge/barq.hpp"
#include "curveforge/bezier.hpp"
#include "curveforge/dual.hpp"
#include "curveforge/errors.hpp"
#include "curveforge/frenet.hpp"

namespace curveforge::optimize {

enum class TermKind { Drive, Rabi, Custom };

struct LossTerm {
  TermKind kind = TermKind::Drive;
  double weight = 1.0;
  // Only for TermKind::Custom; evaluated on the reporting frame.
  std::function<double(const frenet::FrenetData&)> custom;
};

struct LossSpec {
  std::vector<LossTerm> terms;
  // Use the exact maximum instead of the power mean in the Rabi term.
  bool exact_max = false;
  double smooth_max_power = 32.0;

  void validate() const;
  // J_drive + 1e-2 J_Rabi
  static LossSpec barq_default();
};

// |int (r' x r'')/gamma^2 dx|^2
double loss_drive(const frenet::FrenetData& fd);
// T_g times the power-mean (or exact) maximum of |kappa|.
double loss_rabi(const frenet::FrenetData& fd, const LossSpec& spec = LossSpec::barq_default());
double total_loss(const frenet::FrenetData& fd, const LossSpec& spec);

template <typename T>
struct Terms {
  T drive{};
  T rabi{};
};

// Power mean (mean |k|^p)^(1/p) from squared values, rescaled by the largest
// sample so that high powers neither overflow nor underflow.
template <typename T>
T smooth_max_from_squares(const std::vector<T>& k2, double p) {
  using std::pow;
  double s = 0.0;
  for (const auto& v : k2) s = std::max(s, value_of(v));
  if (s == 0.0) return T(0.0);
  T acc(0.0);
  for (const auto& v : k2) acc += pow(v / s, 0.5 * p);
  acc /= static_cast<double>(k2.size());
  return std::sqrt(s) * pow(acc, 1.0 / p);
}

// Drive and Rabi terms of a Bezier curve sampled on a tabulated grid.
template <typename T>
Terms<T> curve_terms(std::span<const Vector3<T>> w, const bezier::BasisTable& table,
                     const LossSpec& spec) {
  using std::sqrt;
  const auto d1 = table.evaluate(w, 1);
  const auto d2 = table.evaluate(w, 2);
  const auto& xs = table.xs();
  const std::size_t n = xs.size();
  std::vector<Vector3<T>> area(n);
  std::vector<T> gamma(n), k2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const T g2 = squared_norm(d1[k]);
    const Vector3<T> c = cross(d1[k], d2[k]);
    area[k] = c * (T(1.0) / g2);
    gamma[k] = sqrt(g2);
    k2[k] = squared_norm(c) / (g2 * g2 * g2);
  }
  Vector3<T> a{T(0.0), T(0.0), T(0.0)};
  T tg(0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double h = 0.5 * (xs[k] - xs[k - 1]);
    a += h * (area[k - 1] + area[k]);
    tg += h * (gamma[k - 1] + gamma[k]);
  }
  Terms<T> out;
  out.drive = squared_norm(a);
  if (spec.exact_max) {
    std::size_t imax = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (value_of(k2[k]) > value_of(k2[imax])) imax = k;
    }
    out.rabi = tg * sqrt(k2[imax]);
  } else {
    out.rabi = tg * smooth_max_from_squares(k2, spec.smooth_max_power);
  }
  return out;
}

template <typename T>
T combine(const Terms<T>& t, const LossSpec& spec) {
  T total(0.0);
  for (const auto& term : spec.terms) {
    if (term.kind == TermKind::Drive) total += term.weight * t.drive;
    if (term.kind == TermKind::Rabi) total += term.weight * t.rabi;
  }
  return total;
}

struct Evaluation {
  double total = 0.0;
  double drive = 0.0;
  double rabi = 0.0;
  std::vector<double> gradient;
};

using Objective = std::function<Evaluation(std::span<const double>)>;

// Forward-mode gradient of a scalar function written generically over the
// scalar type (called with Dual<8> arguments).
template <typename F>
std::vector<double> gradient(F&& f, std::span<const double> x, double* value = nullptr) {
  double v = 0.0;
  auto g = forward_gradient<8>(std::forward<F>(f), x, &v);
  if (!std::isfinite(v)) throw NumericalError("gradient: loss is not finite at this point");
  if (value) *value = v;
  return g;
}

// J over the flat BARQ parameter vector.
class BarqObjective {
 public:
  BarqObjective(barq::BarqConfig config, LossSpec spec, std::size_t grid_size = 513);

  const barq::ParameterLayout& layout() const { return layout_; }
  const barq::BarqConfig& config() const { return config_; }
  const LossSpec& spec() const { return spec_; }

  Terms<double> terms(std::span<const double> x) const;
  double value(std::span<const double> x) const;
  Evaluation evaluate(std::span<const double> x) const;

  template <typename T>
  T loss(std::span<const T> x) const {
    const auto w = barq::build_control_points<T>(x, layout_, config_);
    return combine(curve_terms<T>(std::span<const Vector3<T>>(w), table_, spec_), spec_);
  }

 private:
  barq::BarqConfig config_;
  LossSpec spec_;
  barq::ParameterLayout layout_;
  bezier::BasisTable table_;
};

struct AdamOptions {
  int steps = 5000;
  double lr = 5e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int stride = 1;  // trace every stride steps (and always the last)
};

struct TraceRow {
  int step = 0;
  double total = 0.0;
  double drive = 0.0;
  double rabi = 0.0;
  double grad_norm = 0.0;  // max-norm
};

struct OptimizationTrace {
  std::vector<TraceRow> rows;
  std::vector<double> final_params;
  AdamOptions options;
};

class OptimizationDiverged : public NumericalError {
 public:
  OptimizationDiverged(const std::string& what, OptimizationTrace trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const OptimizationTrace& trace() const { return trace_; }

 private:
  OptimizationTrace trace_;
};

// Row k holds the loss at the parameters before update k; a final row with
// step == steps holds the loss at the returned parameters.
OptimizationTrace run_adam(const Objective& objective, std::vector<double> x0,
                           const AdamOptions& options,
                           const std::function<void(const TraceRow&, std::span<const double>)>&
                               on_row = {});

}  // namespace curveforge::optimize
