#pragma once

#include <cmath>
#include <cstddef>

namespace mheat {

template <class S>
struct Vec3T {
  S c[3];

  S& operator[](std::size_t i) { return c[i]; }
  const S& operator[](std::size_t i) const { return c[i]; }

  friend Vec3T operator+(const Vec3T& a, const Vec3T& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
  }
  friend Vec3T operator-(const Vec3T& a, const Vec3T& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
  }
  template <class T>
  friend Vec3T operator*(const T& s, const Vec3T& a) {
    return {s * a[0], s * a[1], s * a[2]};
  }
  template <class T>
  friend Vec3T operator*(const Vec3T& a, const T& s) {
    return {a[0] * s, a[1] * s, a[2] * s};
  }
  template <class T>
  friend Vec3T operator/(const Vec3T& a, const T& s) {
    return {a[0] / s, a[1] / s, a[2] / s};
  }
  friend bool operator==(const Vec3T& a, const Vec3T& b) {
    return a[0] == b[0] && a[1] == b[1] && a[2] == b[2];
  }
};

using Vec3 = Vec3T<double>;

template <class S>
S dot(const Vec3T<S>& a, const Vec3T<S>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class S>
Vec3T<S> cross(const Vec3T<S>& a, const Vec3T<S>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <class S>
S norm2(const Vec3T<S>& a) {
  return dot(a, a);
}

inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

}  // namespace mheat
