#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "curveforge/frenet.hpp"
#include "curveforge/gatemap.hpp"
#include "curveforge/noise.hpp"
#include "curveforge/propagator.hpp"

namespace curveforge::bench {

struct SweepResult {
  std::vector<double> epsilon;   // rows
  std::vector<double> tg_delta;  // columns, T_g * delta_z
  std::vector<double> infidelity;  // row-major

  double at(std::size_t i, std::size_t j) const { return infidelity[i * tg_delta.size() + j]; }
};

std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace(double a, double b, std::size_t n);

// 1 - F against `reference` for every (epsilon, T_g delta_z) pair.
SweepResult static_sweep(const ControlFields& fields, const Su2& reference,
                         std::span<const double> epsilon, std::span<const double> tg_delta,
                         std::size_t n_steps = 4096);

enum class SweepAxis { Epsilon, Dephasing };

// Log-log slope of the infidelity along one axis over [lo, hi] with the
// other axis at zero. Infidelity is taken against the noise-free propagated
// gate so that it measures the noise response only.
double infidelity_slope(const ControlFields& fields, SweepAxis axis, double lo = 1e-3,
                        double hi = 1e-2, std::size_t points = 9, std::size_t n_steps = 4096);

double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct PsdModel {
  double alpha = 2.0;
  double lambda = 0.0;  // rad/time
};

struct McOptions {
  std::size_t noise_samples = 4096;
  std::size_t n_steps = 4096;
  // Worker threads; 0 means hardware concurrency capped by CURVEFORGE_THREADS.
  unsigned threads = 0;
};

struct McResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  int n = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double lambda = 0.0;
};

McResult mc_infidelity(const ControlFields& fields, const Su2& reference, const PsdModel& psd,
                       int n_realizations, std::uint64_t seed, const McOptions& options = {});

unsigned worker_count(unsigned requested);

struct FilterTable {
  std::vector<double> omega;
  std::vector<double> value;
};

// F_z(w) = |int T e^{-i w t} dt|^2 / 2 with T piecewise linear between frame samples.
FilterTable filter_function(const frenet::FrenetData& fd, std::span<const double> omega);
// Same, for a tangent given on arbitrary time nodes.
FilterTable filter_function(std::span<const double> t, std::span<const Vec3> tangent,
                            std::span<const double> omega);

// Positive log-spaced frequencies over [1e-3, 200] omega_B.
std::vector<double> overlap_grid(double tg, std::size_t n = 16384, double lo = 1e-3,
                                 double hi = 200.0);

// (1/6 pi) int S F dw over both signs of omega, S = lambda^2 T_g (|w|/w_B)^-alpha,
// integrated over the table's (positive) frequency range.
double overlap_infidelity(const FilterTable& table, const PsdModel& psd, double tg);
// Same with an arbitrary two-sided PSD.
double overlap_infidelity(const FilterTable& table, double (*psd)(double, const void*),
                          const void* ctx);

// (1/T_g^3) int |r|^2 dt; the curve must be closed.
double cfi(const frenet::FrenetData& fd);

// (T_g lambda)^2 (T_g w_B)^2 CFI / 6
double cfi_infidelity(double cfi_value, double lambda, double tg);

}  // namespace curveforge::bench
