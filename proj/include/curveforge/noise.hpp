#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace curveforge::bench {

// h[0] = 1, h[k] = h[k-1] (k - 1 + alpha/2) / k, i.e. Gamma(k + alpha/2)/(k! Gamma(alpha/2)).
std::vector<double> fir_impulse_response(double alpha, std::size_t n);

// Input variance lambda^2 N (2 pi / N)^alpha for N samples over the gate.
double fir_input_variance(double alpha, double lambda, std::size_t n);

// Independent generator for realization `index` of a seeded experiment.
std::mt19937_64 realization_rng(std::uint64_t seed, std::uint64_t index);

// Dephasing trace delta_z(t_k) (rad/time) with PSD lambda^2 T_g (omega/omega_B)^-alpha,
// N samples spanning the gate. n/8 leading outputs are discarded as transient.
class ColoredNoise {
 public:
  ColoredNoise(double alpha, double lambda, std::size_t n_samples);
  ~ColoredNoise();
  ColoredNoise(const ColoredNoise&) = delete;
  ColoredNoise& operator=(const ColoredNoise&) = delete;

  std::size_t size() const { return n_; }
  double alpha() const { return alpha_; }
  double lambda() const { return lambda_; }

  // Thread-safe; each call uses its own buffers.
  std::vector<double> generate(std::mt19937_64& rng) const;

 private:
  struct Impl;
  double alpha_, lambda_;
  std::size_t n_;
  Impl* impl_;
};

std::vector<double> generate_colored_noise(double alpha, double lambda, std::size_t n_samples,
                                           double tg, std::uint64_t seed);

// Least-squares log-log slope of the realization-averaged PSD over bins
// [bin_lo, bin_hi] (bin j is omega = 2 pi j / T_g). The periodogram is taken
// of the differenced trace and divided by |1 - e^{-i omega dt}|^2, which keeps
// spectral leakage from steep spectra out of the estimate.
double estimate_psd_slope(double alpha, std::size_t n_samples, int realizations, std::uint64_t seed,
                          std::size_t bin_lo = 8, std::size_t bin_hi = 80);

}  // namespace curveforge::bench
