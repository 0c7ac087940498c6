#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace coolopt {

/// Forward-mode derivative scalar carrying N partials alongside the value.
/// Element residuals are written once against a generic scalar; evaluating
/// them with Dual<N> seeded on the local unknowns yields the exact Jacobian
/// of exactly what the double path computes, stabilization included.
template <std::size_t N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit constant lift

  static Dual seeded(double value, std::size_t slot) {
    Dual x(value);
    x.d[slot] = 1.0;
    return x;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator-(const Dual& a) {
    Dual r;
    r.v = -a.v;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v * b.v;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Dual operator*(double a, Dual b) {
    b.v *= a;
    for (std::size_t i = 0; i < N; ++i) b.d[i] *= a;
    return b;
  }
  friend Dual operator*(Dual a, double b) { return b * a; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r;
    const double inv = 1.0 / b.v;
    r.v = a.v * inv;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
    return r;
  }
  friend Dual operator/(Dual a, double b) {
    const double inv = 1.0 / b;
    a.v *= inv;
    for (std::size_t i = 0; i < N; ++i) a.d[i] *= inv;
    return a;
  }
  friend Dual operator/(double a, const Dual& b) { return Dual(a) / b; }
  friend Dual operator+(Dual a, double b) {
    a.v += b;
    return a;
  }
  friend Dual operator+(double a, Dual b) {
    b.v += a;
    return b;
  }
  friend Dual operator-(Dual a, double b) {
    a.v -= b;
    return a;
  }
  friend Dual operator-(double a, const Dual& b) { return -b + a; }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
};

template <std::size_t N>
Dual<N> sqrt(const Dual<N>& a) {
  Dual<N> r;
  r.v = std::sqrt(a.v);
  const double s = (r.v > 0.0) ? 0.5 / r.v : 0.0;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = s * a.d[i];
  return r;
}

template <std::size_t N>
Dual<N> tanh(const Dual<N>& a) {
  Dual<N> r;
  r.v = std::tanh(a.v);
  const double s = 1.0 - r.v * r.v;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = s * a.d[i];
  return r;
}

inline double value(double x) { return x; }
template <std::size_t N>
double value(const Dual<N>& x) {
  return x.v;
}

}  // namespace coolopt
