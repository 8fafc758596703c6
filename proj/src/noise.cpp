#include "curveforge/noise.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "curveforge/errors.hpp"

namespace curveforge::bench {

using std::numbers::pi;

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_alpha(double alpha) {
  if (alpha != 1.0 && alpha != 2.0) {
    throw ConfigError("colored noise supports alpha in {1, 2} only");
  }
}

}  // namespace

std::vector<double> fir_impulse_response(double alpha, std::size_t n) {
  std::vector<double> h(n);
  if (n == 0) return h;
  h[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    h[k] = h[k - 1] * (static_cast<double>(k) - 1.0 + 0.5 * alpha) / static_cast<double>(k);
  }
  return h;
}

double fir_input_variance(double alpha, double lambda, std::size_t n) {
  const double nn = static_cast<double>(n);
  return lambda * lambda * nn * std::pow(2.0 * pi / nn, alpha);
}

std::mt19937_64 realization_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

struct ColoredNoise::Impl {
  std::size_t total = 0;  // inputs incl. transient
  std::size_t fft = 0;    // zero-padded length
  std::vector<std::complex<double>> hf;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

ColoredNoise::ColoredNoise(double alpha, double lambda, std::size_t n)
    : alpha_(alpha), lambda_(lambda), n_(n), impl_(new Impl) {
  check_alpha(alpha);
  if (n < 256 || (n & (n - 1)) != 0) {
    delete impl_;
    throw ConfigError("noise sample count must be a power of two >= 256");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    delete impl_;
    throw ConfigError("noise amplitude lambda must be finite and nonnegative");
  }
  auto& d = *impl_;
  d.total = n + n / 8;
  d.fft = 4 * n;  // >= 2 * total, linear convolution without wraparound
  const std::size_t nc = d.fft / 2 + 1;
  auto* in = fftw_alloc_real(d.fft);
  auto* out = fftw_alloc_complex(nc);
  {
    std::lock_guard lock(planner_mutex());
    d.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(d.fft), in, out, FFTW_ESTIMATE);
    d.inv = fftw_plan_dft_c2r_1d(static_cast<int>(d.fft), out, in, FFTW_ESTIMATE);
  }
  const auto h = fir_impulse_response(alpha, d.total);
  std::fill(in, in + d.fft, 0.0);
  std::copy(h.begin(), h.end(), in);
  fftw_execute_dft_r2c(d.fwd, in, out);
  d.hf.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) d.hf[i] = {out[i][0], out[i][1]};
  fftw_free(in);
  fftw_free(out);
}

ColoredNoise::~ColoredNoise() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->inv);
  delete impl_;
}

std::vector<double> ColoredNoise::generate(std::mt19937_64& rng) const {
  const auto& d = *impl_;
  std::vector<double> out(n_, 0.0);
  std::normal_distribution<double> normal(0.0, std::sqrt(fir_input_variance(alpha_, lambda_, n_)));
  // Always consume the same number of draws so streams stay aligned.
  std::vector<double> drive(d.total);
  for (auto& v : drive) v = normal(rng);
  if (lambda_ == 0.0) return out;

  const std::size_t nc = d.fft / 2 + 1;
  auto* buf = fftw_alloc_real(d.fft);
  auto* spec = fftw_alloc_complex(nc);
  std::fill(buf, buf + d.fft, 0.0);
  std::copy(drive.begin(), drive.end(), buf);
  fftw_execute_dft_r2c(d.fwd, buf, spec);
  for (std::size_t i = 0; i < nc; ++i) {
    const std::complex<double> z = std::complex<double>(spec[i][0], spec[i][1]) * d.hf[i];
    spec[i][0] = z.real();
    spec[i][1] = z.imag();
  }
  fftw_execute_dft_c2r(d.inv, spec, buf);
  const double norm = 1.0 / static_cast<double>(d.fft);
  const std::size_t skip = n_ / 8;
  for (std::size_t k = 0; k < n_; ++k) out[k] = buf[skip + k] * norm;
  fftw_free(buf);
  fftw_free(spec);
  return out;
}

std::vector<double> generate_colored_noise(double alpha, double lambda, std::size_t n_samples,
                                           double tg, std::uint64_t seed) {
  if (!(tg > 0.0)) throw DomainError("generate_colored_noise: T_g must be positive");
  ColoredNoise gen(alpha, lambda, n_samples);
  auto rng = realization_rng(seed, 0);
  return gen.generate(rng);
}

double estimate_psd_slope(double alpha, std::size_t n, int realizations, std::uint64_t seed,
                          std::size_t bin_lo, std::size_t bin_hi) {
  if (realizations < 1) throw ConfigError("need at least one realization");
  if (bin_lo < 1 || bin_hi <= bin_lo || bin_hi >= n / 2) {
    throw ConfigError("invalid frequency bin range for the PSD slope fit");
  }
  ColoredNoise gen(alpha, 1.0, n);
  const std::size_t nc = n / 2 + 1;
  std::vector<double> psd(nc, 0.0);
  auto* in = fftw_alloc_real(n);
  auto* out = fftw_alloc_complex(nc);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  for (int r = 0; r < realizations; ++r) {
    auto rng = realization_rng(seed, static_cast<std::uint64_t>(r));
    const auto x = gen.generate(rng);
    in[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) in[k] = x[k] - x[k - 1];
    fftw_execute(plan);
    for (std::size_t j = 0; j < nc; ++j) psd[j] += out[j][0] * out[j][0] + out[j][1] * out[j][1];
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t j = bin_lo; j <= bin_hi; ++j) {
    const double w = 2.0 * pi * static_cast<double>(j) / static_cast<double>(n);
    const double s = psd[j] / (4.0 * std::sin(0.5 * w) * std::sin(0.5 * w));
    const double lx = std::log(static_cast<double>(j)), ly = std::log(s);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace curveforge::bench
