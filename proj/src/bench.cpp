#include "curveforge/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>

#include "curveforge/errors.hpp"

namespace curveforge::bench {

using std::numbers::pi;
using cd = std::complex<double>;

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) v.back() = b;
  return v;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  auto v = linspace(std::log(a), std::log(b), n);
  for (auto& x : v) x = std::exp(x);
  if (n > 0) {
    v.front() = a;
    v.back() = b;
  }
  return v;
}

SweepResult static_sweep(const ControlFields& fields, const Su2& reference,
                         std::span<const double> epsilon, std::span<const double> tg_delta,
                         std::size_t n_steps) {
  SweepResult r;
  r.epsilon.assign(epsilon.begin(), epsilon.end());
  r.tg_delta.assign(tg_delta.begin(), tg_delta.end());
  r.infidelity.reserve(epsilon.size() * tg_delta.size());
  for (double e : epsilon) {
    for (double d : tg_delta) {
      if (!std::isfinite(e) || !std::isfinite(d)) throw DomainError("static_sweep: non-finite grid value");
      PropagateOptions o;
      o.n_steps = n_steps;
      o.noise = {e, d / fields.tg};
      r.infidelity.push_back(infidelity(propagate_su2(fields, o), reference));
    }
  }
  return r;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("slope fit needs positive samples");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double infidelity_slope(const ControlFields& fields, SweepAxis axis, double lo, double hi,
                        std::size_t points, std::size_t n_steps) {
  PropagateOptions o;
  o.n_steps = n_steps;
  const Su2 ref = propagate_su2(fields, o);
  const auto xs = logspace(lo, hi, points);
  std::vector<double> ys;
  for (double x : xs) {
    PropagateOptions on = o;
    if (axis == SweepAxis::Epsilon) {
      on.noise.epsilon = x;
    } else {
      on.noise.delta_z = x / fields.tg;
    }
    // Infidelity is even in the noise strength to leading order; average both signs.
    const double a = infidelity(propagate_su2(fields, on), ref);
    if (axis == SweepAxis::Epsilon) {
      on.noise.epsilon = -x;
    } else {
      on.noise.delta_z = -x / fields.tg;
    }
    const double b = infidelity(propagate_su2(fields, on), ref);
    ys.push_back(0.5 * (a + b));
  }
  return fit_loglog_slope(xs, ys);
}

unsigned worker_count(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CURVEFORGE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

McResult mc_infidelity(const ControlFields& fields, const Su2& reference, const PsdModel& psd,
                       int n_realizations, std::uint64_t seed, const McOptions& options) {
  if (n_realizations < 2) throw ConfigError("Monte Carlo needs at least 2 realizations");
  if (options.n_steps < options.noise_samples) {
    throw ConfigError("propagation steps must resolve every noise sample");
  }
  const ColoredNoise gen(psd.alpha, psd.lambda, options.noise_samples);
  std::vector<double> results(static_cast<std::size_t>(n_realizations));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n_realizations; i = next++) {
      auto rng = realization_rng(seed, static_cast<std::uint64_t>(i));
      const auto trace = gen.generate(rng);
      PropagateOptions o;
      o.n_steps = options.n_steps;
      o.dz_trace = trace;
      results[static_cast<std::size_t>(i)] = infidelity(propagate_su2(fields, o), reference);
    }
  };
  const unsigned nt = std::min<unsigned>(worker_count(options.threads),
                                         static_cast<unsigned>(n_realizations));
  if (nt <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  // Fixed-order reduction.
  double sum = 0.0;
  for (double v : results) sum += v;
  const double mean = sum / n_realizations;
  double ss = 0.0;
  for (double v : results) ss += (v - mean) * (v - mean);
  McResult r;
  r.mean = mean;
  r.stderr_ = std::sqrt(ss / (n_realizations - 1) / n_realizations);
  r.n = n_realizations;
  r.seed = seed;
  r.alpha = psd.alpha;
  r.lambda = psd.lambda;
  return r;
}

namespace {

// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z (z - 1) + 1)/z^2, i.e. the
// integrals of e^{zu} and u e^{zu} over [0, 1].
void filon_weights(cd z, cd& p1, cd& p2) {
  if (std::abs(z) < 0.1) {
    cd term = 1.0;
    p1 = 0.0;
    p2 = 0.0;
    for (int k = 0; k < 12; ++k) {
      p1 += term / static_cast<double>(k + 1);
      p2 += term / static_cast<double>(k + 2);
      term *= z / static_cast<double>(k + 1);
    }
    return;
  }
  const cd e = std::exp(z);
  p1 = (e - 1.0) / z;
  p2 = (e * (z - 1.0) + 1.0) / (z * z);
}

}  // namespace

FilterTable filter_function(std::span<const double> t, std::span<const Vec3> tangent,
                            std::span<const double> omega) {
  if (t.size() != tangent.size() || t.size() < 2) {
    throw DomainError("filter_function: tangent samples do not match the time grid");
  }
  FilterTable out;
  out.omega.assign(omega.begin(), omega.end());
  out.value.resize(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double w = omega[i];
    cd fx = 0.0, fy = 0.0, fz = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      const double h = t[k + 1] - t[k];
      if (h <= 0.0) continue;
      cd p1, p2;
      filon_weights(cd(0.0, -w * h), p1, p2);
      const cd ph = std::polar(h, -w * t[k]);
      const Vec3& a = tangent[k];
      const Vec3 d = tangent[k + 1] - a;
      fx += ph * (a.x * p1 + d.x * p2);
      fy += ph * (a.y * p1 + d.y * p2);
      fz += ph * (a.z * p1 + d.z * p2);
    }
    out.value[i] = 0.5 * (std::norm(fx) + std::norm(fy) + std::norm(fz));
  }
  return out;
}

FilterTable filter_function(const frenet::FrenetData& fd, std::span<const double> omega) {
  std::vector<double> t(fd.size());
  std::vector<Vec3> tan(fd.size());
  for (std::size_t k = 0; k < fd.size(); ++k) {
    t[k] = fd.samples[k].t;
    tan[k] = fd.samples[k].tangent;
  }
  return filter_function(t, tan, omega);
}

std::vector<double> overlap_grid(double tg, std::size_t n, double lo, double hi) {
  if (!(tg > 0.0)) throw DomainError("overlap_grid: T_g must be positive");
  const double wb = 2.0 * pi / tg;
  return logspace(lo * wb, hi * wb, n);
}

double overlap_infidelity(const FilterTable& table, double (*psd)(double, const void*),
                          const void* ctx) {
  double acc = 0.0;
  for (std::size_t i = 1; i < table.omega.size(); ++i) {
    const double a = table.omega[i - 1], b = table.omega[i];
    acc += 0.5 * (b - a) * (psd(a, ctx) * table.value[i - 1] + psd(b, ctx) * table.value[i]);
  }
  // Both signs of omega contribute equally (F and S are even).
  return 2.0 * acc / (6.0 * pi);
}

double overlap_infidelity(const FilterTable& table, const PsdModel& psd, double tg) {
  struct Ctx {
    double lambda, alpha, tg, wb;
  } ctx{psd.lambda, psd.alpha, tg, 2.0 * pi / tg};
  return overlap_infidelity(
      table,
      [](double w, const void* p) {
        const auto& c = *static_cast<const Ctx*>(p);
        return c.lambda * c.lambda * c.tg * std::pow(std::abs(w) / c.wb, -c.alpha);
      },
      &ctx);
}

double cfi(const frenet::FrenetData& fd) {
  const auto m = frenet::robustness_measures(fd);
  if (!(m.closure_gap < 1e-8)) {
    throw PreconditionError(
        "CFI requires a closed curve (r(T_g) = r(0)); closure gap is " +
        std::to_string(m.closure_gap));
  }
  return m.cfi;
}

double cfi_infidelity(double cfi_value, double lambda, double tg) {
  const double a = tg * lambda;
  const double b = tg * 2.0 * pi / tg;
  return a * a * b * b * cfi_value / 6.0;
}

}  // namespace curveforge::bench
