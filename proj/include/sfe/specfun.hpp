/*
Copyright 2026 The sfe Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <vector>

#include "sfe/types.hpp"

namespace sfe {

struct OrderDegree {
  int nu = 0;
  int mu = 0;

  constexpr int flat() const { return nu * nu + nu + mu; }
  static constexpr OrderDegree from_flat(int i) {
    int n = 0;
    while ((n + 1) * (n + 1) <= i) ++n;
    return {n, i - n * n - n};
  }
  constexpr bool valid() const { return nu >= 0 && mu >= -nu && mu <= nu; }
};

inline constexpr int num_coeffs(int order) { return (order + 1) * (order + 1); }

namespace detail {

template <std::floating_point T>
T sph_bessel_series(int nu, T x) {
  T t = 1;
  for (int i = 1; i <= nu; ++i) t *= x / T(2 * i + 1);
  const T q = -x * x / 2;
  T sum = t;
  for (int k = 1; k < 500; ++k) {
    t *= q / (T(k) * T(2 * nu + 2 * k + 1));
    sum += t;
    if (std::abs(t) <= std::numeric_limits<T>::epsilon() * std::abs(sum) * T(0.25)) break;
  }
  return sum;
}

// Miller's downward recurrence, normalized against the closed-form j0 or j1.
template <std::floating_point T>
void sph_bessel_miller(int nmax, T x, std::vector<T>& out) {
  const int big = std::max(nmax, static_cast<int>(std::ceil(x)));
  const int start = big + 20 + static_cast<int>(std::sqrt(60.0 * big));
  out.assign(nmax + 1, T(0));
  T fp = 0;
  T f = std::numeric_limits<T>::min() * T(1e10);
  if (start <= nmax) out[start] = f;
  for (int n = start; n > 0; --n) {
    T fm = T(2 * n + 1) / x * f - fp;
    fp = f;
    f = fm;
    if (n - 1 <= nmax) out[n - 1] = f;
    if (std::abs(f) > T(1e200)) {
      const T s = T(1e-200);
      f *= s;
      fp *= s;
      for (int i = n - 1; i <= nmax; ++i) out[i] *= s;
    }
  }
  // out[0] now holds f0, and fp holds f1.
  const T j0 = std::sin(x) / x;
  const T j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  const T scale = (std::abs(j0) >= std::abs(j1)) ? j0 / out[0] : j1 / fp;
  for (auto& v : out) v *= scale;
}

}  // namespace detail

// Spherical Bessel functions j_0..j_nmax at x.
template <std::floating_point T>
std::vector<T> sph_bessel_j_all(int nmax, T x) {
  std::vector<T> out(nmax + 1, T(0));
  if (x < 0) {
    out = sph_bessel_j_all(nmax, -x);
    for (int n = 1; n <= nmax; n += 2) out[n] = -out[n];
    return out;
  }
  if (x == 0) {
    out[0] = 1;
    return out;
  }
  if (x < 1) {
    for (int n = 0; n <= nmax; ++n) out[n] = detail::sph_bessel_series(n, x);
    return out;
  }
  detail::sph_bessel_miller(nmax, x, out);
  return out;
}

template <std::floating_point T>
T sph_bessel_j(int nu, T x) {
  if (x < 0) return neg1pow(nu) * sph_bessel_j(nu, -x);
  if (x == 0) return nu == 0 ? T(1) : T(0);
  if (x < 1 || x < T(nu) / 2) return detail::sph_bessel_series(nu, x);
  std::vector<T> v;
  detail::sph_bessel_miller(nu, x, v);
  return v[nu];
}

// Spherical Neumann functions by upward recurrence.
template <std::floating_point T>
std::vector<T> sph_bessel_y_all(int nmax, T x) {
  if (x == 0) throw SingularityError("spherical Neumann function at x = 0");
  if (x < 0) {
    auto out = sph_bessel_y_all(nmax, -x);
    for (int n = 0; n <= nmax; n += 2) out[n] = -out[n];
    return out;
  }
  std::vector<T> y(nmax + 1);
  y[0] = -std::cos(x) / x;
  if (nmax >= 1) y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int n = 1; n < nmax; ++n) y[n + 1] = T(2 * n + 1) / x * y[n] - y[n - 1];
  return y;
}

template <std::floating_point T>
std::vector<std::complex<T>> sph_hankel_h1_all(int nmax, T x) {
  if (x == 0) throw SingularityError("spherical Hankel function at x = 0");
  const auto j = sph_bessel_j_all(nmax, x);
  const auto y = sph_bessel_y_all(nmax, x);
  std::vector<std::complex<T>> h(nmax + 1);
  for (int n = 0; n <= nmax; ++n) h[n] = {j[n], y[n]};
  return h;
}

template <std::floating_point T>
std::complex<T> sph_hankel_h1(int nu, T x) {
  return sph_hankel_h1_all(nu, x)[nu];
}

// Derivatives of j_0..j_nmax.
template <std::floating_point T>
std::vector<T> sph_bessel_j_deriv_all(int nmax, T x) {
  const auto j = sph_bessel_j_all(nmax + 1, x);
  std::vector<T> d(nmax + 1);
  d[0] = -j[1];
  for (int n = 1; n <= nmax; ++n) {
    d[n] = (T(n) * j[n - 1] - T(n + 1) * j[n + 1]) / T(2 * n + 1);
  }
  return d;
}

template <std::floating_point T>
T sph_bessel_j_deriv(int nu, T x) {
  return sph_bessel_j_deriv_all(nu, x)[nu];
}

template <std::floating_point T>
std::vector<std::complex<T>> sph_hankel_h1_deriv_all(int nmax, T x) {
  const auto h = sph_hankel_h1_all(nmax + 1, x);
  std::vector<std::complex<T>> d(nmax + 1);
  d[0] = -h[1];
  for (int n = 1; n <= nmax; ++n) d[n] = h[n - 1] - T(n + 1) / x * h[n];
  return d;
}

template <std::floating_point T>
std::complex<T> sph_hankel_h1_deriv(int nu, T x) {
  return sph_hankel_h1_deriv_all(nu, x)[nu];
}

// Unnormalized spherical harmonics sqrt(4 pi) Y_{nu,mu} for all nu <= order,
// flat-indexed, Condon-Shortley phase. dir need not be normalized here.
inline std::vector<Complex> sph_harm_all_unchecked(int order, const Vec3& dir) {
  const double r = dir.norm();
  const double ct = r > 0 ? dir.z() / r : 1.0;
  const double rho = std::hypot(dir.x(), dir.y());
  const double st = r > 0 ? rho / r : 0.0;
  const double phi = rho > 0 ? std::atan2(dir.y(), dir.x()) : 0.0;

  std::vector<Complex> out(num_coeffs(order));
  std::vector<double> q(order + 1);  // Q_nu^m for the current m
  double qmm = 1.0;
  for (int m = 0; m <= order; ++m) {
    if (m > 0) qmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st;
    q[m] = qmm;
    if (m + 1 <= order) q[m + 1] = std::sqrt(2.0 * m + 3.0) * ct * qmm;
    for (int n = m + 2; n <= order; ++n) {
      const double a = std::sqrt((2.0 * n + 1) * (2.0 * n - 1) / ((n - m) * double(n + m)));
      const double b = std::sqrt((2.0 * n + 1) * (n - 1.0 - m) * (n - 1.0 + m) /
                                 ((2.0 * n - 3) * (n - m) * double(n + m)));
      q[n] = a * ct * q[n - 1] - b * q[n - 2];
    }
    const Complex e = std::polar(1.0, m * phi);
    for (int n = m; n <= order; ++n) {
      const Complex y = q[n] * e;
      out[OrderDegree{n, m}.flat()] = y;
      if (m > 0) out[OrderDegree{n, -m}.flat()] = neg1pow(m) * std::conj(y);
    }
  }
  return out;
}

inline std::vector<Complex> sph_harm_all(int order, const Vec3& dir) {
  require_unit(dir, "direction");
  return sph_harm_all_unchecked(order, dir);
}

inline Complex sph_harm(OrderDegree idx, const Vec3& dir) {
  return sph_harm_all(idx.nu, dir)[idx.flat()];
}

namespace detail {

inline const std::vector<long double>& factorials() {
  static const std::vector<long double> f = [] {
    std::vector<long double> v(401);
    v[0] = 1.0L;
    for (int i = 1; i < 401; ++i) v[i] = v[i - 1] * i;
    return v;
  }();
  return f;
}

}  // namespace detail

// Wigner 3j symbol by the Racah formula, accumulated in long double.
inline double wigner_3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return 0.0;
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  const auto& f = detail::factorials();
  if (j1 + j2 + j3 + 1 >= static_cast<int>(f.size())) {
    throw std::out_of_range("wigner_3j: order too large");
  }
  const long double tri = f[j1 + j2 - j3] * f[j1 - j2 + j3] * f[-j1 + j2 + j3] /
                          f[j1 + j2 + j3 + 1];
  const long double pre = std::sqrt(tri * f[j1 + m1] * f[j1 - m1] * f[j2 + m2] *
                                    f[j2 - m2] * f[j3 + m3] * f[j3 - m3]);
  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; ++k) {
    const long double den = f[k] * f[j3 - j2 + k + m1] * f[j3 - j1 + k - m2] *
                            f[j1 + j2 - j3 - k] * f[j1 - k - m1] * f[j2 - k + m2];
    sum += ((k % 2) ? -1.0L : 1.0L) / den;
  }
  const int ph = j1 - j2 - m3;
  return static_cast<double>(((ph % 2) ? -1.0L : 1.0L) * pre * sum);
}

// (1/4pi) * integral of conj(Y_a) Y_b conj(Y_c) over the sphere, with the
// unnormalized harmonics. Real-valued; nonzero only when c.mu = b.mu - a.mu.
inline double gaunt(OrderDegree a, OrderDegree b, OrderDegree c) {
  if (c.mu != b.mu - a.mu) return 0.0;
  if ((a.nu + b.nu + c.nu) % 2) return 0.0;
  const double w0 = wigner_3j(a.nu, b.nu, c.nu, 0, 0, 0);
  if (w0 == 0.0) return 0.0;
  const double w = wigner_3j(a.nu, b.nu, c.nu, -a.mu, b.mu, -c.mu);
  return neg1pow(a.mu + c.mu) *
         std::sqrt((2.0 * a.nu + 1) * (2.0 * b.nu + 1) * (2.0 * c.nu + 1)) * w0 * w;
}

class Rotation3 {
 public:
  Rotation3() : m_(Eigen::Matrix3d::Identity()) {}
  explicit Rotation3(const Eigen::Matrix3d& m) : m_(m) {
    if ((m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-12 ||
        std::abs(m.determinant() - 1.0) > 1e-12) {
      throw std::invalid_argument("matrix is not a proper rotation");
    }
  }

  static Rotation3 about_z(double a) {
    return Rotation3(Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix());
  }
  static Rotation3 about_y(double a) {
    return Rotation3(Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix());
  }
  static Rotation3 from_euler_zyz(double alpha, double beta, double gamma) {
    return Rotation3((Eigen::AngleAxisd(alpha, Vec3::UnitZ()) *
                      Eigen::AngleAxisd(beta, Vec3::UnitY()) *
                      Eigen::AngleAxisd(gamma, Vec3::UnitZ()))
                         .toRotationMatrix());
  }

  const Eigen::Matrix3d& matrix() const { return m_; }
  Vec3 apply(const Vec3& v) const { return m_ * v; }

  // R = Rz(alpha) Ry(beta) Rz(gamma).
  std::array<double, 3> euler_zyz() const {
    const auto& r = m_;
    const double sb = std::hypot(r(2, 0), r(2, 1));
    const double beta = std::atan2(sb, r(2, 2));
    if (sb < 1e-12) {
      if (r(2, 2) > 0) return {std::atan2(r(1, 0), r(0, 0)), 0.0, 0.0};
      return {std::atan2(-r(1, 0), r(1, 1)), kPi, 0.0};
    }
    return {std::atan2(r(1, 2), r(0, 2)), beta, std::atan2(r(2, 1), -r(2, 0))};
  }

 private:
  Eigen::Matrix3d m_;
};

// Wigner small-d matrix d^nu_{mu,mu'}(beta), rows/cols indexed mu + nu.
inline RMatrix wigner_small_d(int nu, double beta) {
  const auto& f = detail::factorials();
  const double c = std::cos(beta / 2);
  const double s = std::sin(beta / 2);
  RMatrix d(2 * nu + 1, 2 * nu + 1);
  for (int mp = -nu; mp <= nu; ++mp) {
    for (int m = -nu; m <= nu; ++m) {
      const long double pre =
          std::sqrt(f[nu + mp] * f[nu - mp] * f[nu + m] * f[nu - m]);
      long double sum = 0.0L;
      const int smin = std::max(0, m - mp);
      const int smax = std::min(nu + m, nu - mp);
      for (int k = smin; k <= smax; ++k) {
        const long double den = f[nu + m - k] * f[k] * f[mp - m + k] * f[nu - mp - k];
        const int pc = 2 * nu + m - mp - 2 * k;
        const int ps = mp - m + 2 * k;
        long double term = std::pow((long double)c, pc) * std::pow((long double)s, ps) / den;
        sum += ((mp - m + k) % 2 ? -term : term);
      }
      d(mp + nu, m + nu) = static_cast<double>(pre * sum);
    }
  }
  return d;
}

// D^nu_{mu,mu'}(R) = (1/4pi) * integral of conj(Y_{nu,mu}(R x)) Y_{nu,mu'}(x).
inline CMatrix wigner_d(int nu, const Rotation3& rot) {
  const auto [alpha, beta, gamma] = rot.euler_zyz();
  const RMatrix d = wigner_small_d(nu, beta);
  CMatrix D(2 * nu + 1, 2 * nu + 1);
  for (int mu = -nu; mu <= nu; ++mu) {
    for (int mp = -nu; mp <= nu; ++mp) {
      D(mu + nu, mp + nu) =
          std::polar(1.0, -mu * alpha) * d(mu + nu, mp + nu) * std::polar(1.0, -mp * gamma);
    }
  }
  return D;
}

}  // namespace sfe
