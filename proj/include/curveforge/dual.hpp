#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace curveforge {

// Forward-mode dual number carrying N directional derivatives.
//
// Gradients with more than N inputs are assembled chunk by chunk: each pass
// seeds N of the inputs and reads back N partials (see forward_gradient).
template <std::size_t N>
struct Dual {
  double val = 0.0;
  std::array<double, N> d{};

  constexpr Dual() = default;
  constexpr Dual(double v) : val(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr std::size_t width = N;

  constexpr Dual& operator+=(const Dual& o) {
    val += o.val;
    for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    val -= o.val;
    for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    for (std::size_t i = 0; i < N; ++i) d[i] = d[i] * o.val + val * o.d[i];
    val *= o.val;
    return *this;
  }
  constexpr Dual& operator*=(double s) {
    val *= s;
    for (auto& di : d) di *= s;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.val;
    const double q = val * inv;
    for (std::size_t i = 0; i < N; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    val = q;
    return *this;
  }
  constexpr Dual& operator/=(double s) { return *this *= (1.0 / s); }
};

template <std::size_t N>
constexpr Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <std::size_t N>
constexpr Dual<N> operator+(Dual<N> a, double b) { a.val += b; return a; }
template <std::size_t N>
constexpr Dual<N> operator+(double a, Dual<N> b) { b.val += a; return b; }

template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a, double b) { a.val -= b; return a; }
template <std::size_t N>
constexpr Dual<N> operator-(double a, const Dual<N>& b) {
  Dual<N> r = -b;
  r.val += a;
  return r;
}
template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a) {
  a.val = -a.val;
  for (auto& di : a.d) di = -di;
  return a;
}

template <std::size_t N>
constexpr Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <std::size_t N>
constexpr Dual<N> operator*(Dual<N> a, double b) { return a *= b; }
template <std::size_t N>
constexpr Dual<N> operator*(double a, Dual<N> b) { return b *= a; }

template <std::size_t N>
constexpr Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <std::size_t N>
constexpr Dual<N> operator/(Dual<N> a, double b) { return a /= b; }
template <std::size_t N>
constexpr Dual<N> operator/(double a, const Dual<N>& b) { return Dual<N>(a) /= b; }

template <std::size_t N>
constexpr bool operator<(const Dual<N>& a, const Dual<N>& b) { return a.val < b.val; }
template <std::size_t N>
constexpr bool operator>(const Dual<N>& a, const Dual<N>& b) { return a.val > b.val; }

// Apply the chain rule for a scalar function with value f and derivative df.
template <std::size_t N>
constexpr Dual<N> chain(const Dual<N>& a, double f, double df) {
  Dual<N> r;
  r.val = f;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = df * a.d[i];
  return r;
}

template <std::size_t N>
Dual<N> sqrt(const Dual<N>& a) {
  const double s = std::sqrt(a.val);
  return chain(a, s, 0.5 / s);
}
template <std::size_t N>
Dual<N> sin(const Dual<N>& a) { return chain(a, std::sin(a.val), std::cos(a.val)); }
template <std::size_t N>
Dual<N> cos(const Dual<N>& a) { return chain(a, std::cos(a.val), -std::sin(a.val)); }
template <std::size_t N>
Dual<N> exp(const Dual<N>& a) {
  const double e = std::exp(a.val);
  return chain(a, e, e);
}
template <std::size_t N>
Dual<N> log(const Dual<N>& a) { return chain(a, std::log(a.val), 1.0 / a.val); }
template <std::size_t N>
Dual<N> pow(const Dual<N>& a, double p) {
  const double v = std::pow(a.val, p);
  return chain(a, v, p * std::pow(a.val, p - 1.0));
}
template <std::size_t N>
Dual<N> abs(const Dual<N>& a) { return a.val < 0.0 ? -a : a; }

inline double value_of(double x) { return x; }
template <std::size_t N>
double value_of(const Dual<N>& x) { return x.val; }

template <typename T>
inline constexpr bool is_dual_v = false;
template <std::size_t N>
inline constexpr bool is_dual_v<Dual<N>> = true;

// Gradient of a scalar function by chunked forward-mode differentiation.
// `f` is a generic callable taking std::span<const Dual<N>> and returning Dual<N>.
template <std::size_t N = 8, typename F>
std::vector<double> forward_gradient(F&& f, std::span<const double> x, double* value = nullptr) {
  const std::size_t n = x.size();
  std::vector<double> grad(n, 0.0);
  std::vector<Dual<N>> xd(n);
  for (std::size_t i = 0; i < n; ++i) xd[i] = Dual<N>(x[i]);
  if (n == 0) {
    if (value) *value = value_of(f(std::span<const Dual<N>>(xd)));
    return grad;
  }
  for (std::size_t start = 0; start < n; start += N) {
    const std::size_t stop = std::min(n, start + N);
    for (std::size_t i = start; i < stop; ++i) xd[i].d[i - start] = 1.0;
    const Dual<N> y = f(std::span<const Dual<N>>(xd));
    for (std::size_t i = start; i < stop; ++i) {
      grad[i] = y.d[i - start];
      xd[i].d[i - start] = 0.0;
    }
    if (value && start == 0) *value = y.val;
  }
  return grad;
}

}  // namespace curveforge
