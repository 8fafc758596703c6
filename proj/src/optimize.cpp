#include "curveforge/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace curveforge::optimize {

void LossSpec::validate() const {
  if (terms.empty()) throw ConfigError("loss spec needs at least one term");
  for (const auto& t : terms) {
    if (!std::isfinite(t.weight) || t.weight < 0.0) {
      throw ConfigError("loss weights must be finite and nonnegative");
    }
    if (t.kind == TermKind::Custom && !t.custom) {
      throw ConfigError("custom loss term without a function");
    }
  }
  if (!(smooth_max_power >= 1.0)) throw ConfigError("smooth-max power must be >= 1");
}

LossSpec LossSpec::barq_default() {
  LossSpec s;
  s.terms = {{TermKind::Drive, 1.0, {}}, {TermKind::Rabi, 1e-2, {}}};
  return s;
}

double loss_drive(const frenet::FrenetData& fd) {
  return squared_norm(frenet::tangent_area(fd, 0, fd.size() - 1));
}

double loss_rabi(const frenet::FrenetData& fd, const LossSpec& spec) {
  if (spec.exact_max) {
    double m = 0.0;
    for (const auto& s : fd.samples) m = std::max(m, std::abs(s.kappa));
    return fd.total_length * m;
  }
  std::vector<double> k2(fd.size());
  for (std::size_t k = 0; k < fd.size(); ++k) k2[k] = fd.samples[k].kappa * fd.samples[k].kappa;
  return fd.total_length * smooth_max_from_squares(k2, spec.smooth_max_power);
}

double total_loss(const frenet::FrenetData& fd, const LossSpec& spec) {
  spec.validate();
  double total = 0.0;
  for (const auto& t : spec.terms) {
    if (t.weight == 0.0) continue;
    switch (t.kind) {
      case TermKind::Drive: total += t.weight * loss_drive(fd); break;
      case TermKind::Rabi: total += t.weight * loss_rabi(fd, spec); break;
      case TermKind::Custom: total += t.weight * t.custom(fd); break;
    }
  }
  return total;
}

BarqObjective::BarqObjective(barq::BarqConfig config, LossSpec spec, std::size_t grid_size)
    : config_(std::move(config)),
      spec_(std::move(spec)),
      layout_(config_),
      table_(config_.degree(), bezier::uniform_grid(grid_size), 2) {
  spec_.validate();
  for (const auto& t : spec_.terms) {
    if (t.kind == TermKind::Custom) {
      throw ConfigError("custom loss terms are not differentiable and cannot drive the optimizer");
    }
  }
}

Terms<double> BarqObjective::terms(std::span<const double> x) const {
  const auto w = barq::build_control_points<double>(x, layout_, config_);
  return curve_terms<double>(std::span<const Vec3>(w), table_, spec_);
}

double BarqObjective::value(std::span<const double> x) const { return combine(terms(x), spec_); }

Evaluation BarqObjective::evaluate(std::span<const double> x) const {
  Evaluation e;
  const auto t = terms(x);
  e.drive = t.drive;
  e.rabi = t.rabi;
  e.gradient = gradient([this](auto v) { return loss(v); }, x, &e.total);
  return e;
}

OptimizationTrace run_adam(const Objective& objective, std::vector<double> x0,
                           const AdamOptions& o,
                           const std::function<void(const TraceRow&, std::span<const double>)>& on_row) {
  if (o.steps < 1) throw ConfigError("Adam needs steps >= 1");
  if (o.stride < 1) throw ConfigError("trace stride must be >= 1");
  if (!(o.lr > 0.0) || !(o.beta1 >= 0.0 && o.beta1 < 1.0) || !(o.beta2 >= 0.0 && o.beta2 < 1.0) ||
      !(o.eps > 0.0)) {
    throw ConfigError("invalid Adam hyperparameters");
  }
  OptimizationTrace trace;
  trace.options = o;
  const std::size_t n = x0.size();
  std::vector<double> x = std::move(x0), m(n, 0.0), v(n, 0.0);
  double b1t = 1.0, b2t = 1.0;

  auto record = [&](int step, const Evaluation& e) {
    double gmax = 0.0;
    for (double g : e.gradient) gmax = std::max(gmax, std::abs(g));
    TraceRow row{step, e.total, e.drive, e.rabi, gmax};
    trace.rows.push_back(row);
    if (on_row) on_row(row, x);
  };
  auto check = [&](int step, const Evaluation& e) {
    bool ok = std::isfinite(e.total) && e.gradient.size() == n;
    for (double g : e.gradient) ok = ok && std::isfinite(g);
    if (!ok) {
      trace.final_params = x;
      throw OptimizationDiverged("optimization diverged at step " + std::to_string(step), trace);
    }
  };

  for (int k = 0; k < o.steps; ++k) {
    Evaluation e;
    try {
      e = objective(x);
    } catch (const NumericalError&) {
      e.total = NAN;
    } catch (const FrameUndefinedError&) {
      e.total = NAN;
    }
    check(k, e);
    if (k % o.stride == 0) record(k, e);
    b1t *= o.beta1;
    b2t *= o.beta2;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = e.gradient[i];
      m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g;
      v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g * g;
      const double mh = m[i] / (1.0 - b1t);
      const double vh = v[i] / (1.0 - b2t);
      x[i] -= o.lr * mh / (std::sqrt(vh) + o.eps);
    }
  }
  Evaluation e;
  try {
    e = objective(x);
  } catch (const NumericalError&) {
    e.total = NAN;
  } catch (const FrameUndefinedError&) {
    e.total = NAN;
  }
  check(o.steps, e);
  record(o.steps, e);
  trace.final_params = x;
  return trace;
}

}  // namespace curveforge::optimize
