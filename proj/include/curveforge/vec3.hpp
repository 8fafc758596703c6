#pragma once

#include <cmath>
#include <ostream>
#include <type_traits>

namespace curveforge {

// Minimal 3-vector usable with plain doubles and with dual numbers, so the
// same geometry code runs in the differentiable loss path.
template <typename T>
struct Vector3 {
  T x{}, y{}, z{};

  constexpr Vector3() = default;
  constexpr Vector3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

  template <typename U>
  explicit constexpr Vector3(const Vector3<U>& o) : x(T(o.x)), y(T(o.y)), z(T(o.z)) {}

  constexpr T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vector3& operator+=(const Vector3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vector3& operator-=(const Vector3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  template <typename S>
  constexpr Vector3& operator*=(const S& s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vector3 operator+(Vector3 a, const Vector3& b) { return a += b; }
  friend constexpr Vector3 operator-(Vector3 a, const Vector3& b) { return a -= b; }
  friend constexpr Vector3 operator-(const Vector3& a) { return {-a.x, -a.y, -a.z}; }

  friend constexpr bool operator==(const Vector3&, const Vector3&) = default;
};

template <typename T>
constexpr Vector3<T> operator*(const Vector3<T>& v, const T& s) {
  return {v.x * s, v.y * s, v.z * s};
}
template <typename T>
constexpr Vector3<T> operator*(const T& s, const Vector3<T>& v) {
  return {s * v.x, s * v.y, s * v.z};
}
template <typename T>
constexpr Vector3<T> operator/(const Vector3<T>& v, const T& s) {
  return {v.x / s, v.y / s, v.z / s};
}
// Scaling a dual-valued vector by a plain double.
template <typename T>
  requires(!std::is_same_v<T, double>)
constexpr Vector3<T> operator*(double s, const Vector3<T>& v) {
  return {s * v.x, s * v.y, s * v.z};
}
template <typename T>
  requires(!std::is_same_v<T, double>)
constexpr Vector3<T> operator*(const Vector3<T>& v, double s) {
  return {v.x * s, v.y * s, v.z * s};
}

template <typename T>
constexpr T dot(const Vector3<T>& a, const Vector3<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <typename T>
constexpr Vector3<T> cross(const Vector3<T>& a, const Vector3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <typename T>
constexpr T squared_norm(const Vector3<T>& v) {
  return dot(v, v);
}

template <typename T>
T norm(const Vector3<T>& v) {
  using std::sqrt;
  return sqrt(dot(v, v));
}

template <typename T>
Vector3<T> normalized(const Vector3<T>& v) {
  return v / norm(v);
}

using Vec3 = Vector3<double>;

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
}

inline bool all_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

}  // namespace curveforge
