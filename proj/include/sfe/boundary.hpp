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
#include <cmath>
#include <string>
#include <vector>

#include "sfe/observation.hpp"
#include "sfe/radial.hpp"
#include "sfe/wavefuncs.hpp"

namespace sfe {

struct ForbiddenWavenumberError : std::domain_error {
  using std::domain_error::domain_error;
};

struct BoundaryOptions {
  double a = 0.5;               // first-order parameter
  double response_floor = 1e-8;  // |A_nu| below this is reported
  bool zero_weak_orders = false;
};

struct BoundaryEstimate {
  CoefficientSet coefficients;
  ArrayType array_type = ArrayType::kOmni;
  double radius = 1.0;
  int num_mics = 0;
  double min_abs_response = 0.0;
  int min_response_order = 0;
  std::vector<int> weak_orders;  // orders with |A_nu| < floor
  std::vector<std::string> warnings;

  int order() const { return coefficients.order; }
  // (N+1)^2 <= M.
  bool truncation_rule_ok() const { return num_coeffs(order()) <= num_mics; }
};

// alpha_{nu,mu} = (1/A_nu) sum_m w_m conj(Y_{nu,mu}(x_m)) s_m.
inline BoundaryEstimate estimate_coefficients(const CVector& s, const std::vector<Vec3>& x,
                                              const std::vector<double>& w, ArrayType type, double R,
                                              double k, int N, const BoundaryOptions& opt = {}) {
  const int M = static_cast<int>(x.size());
  if (s.size() != M || static_cast<int>(w.size()) != M)
    throw std::invalid_argument("signal, position and weight counts differ");
  if (N < 0) throw std::invalid_argument("truncation order must be non-negative");
  if (!(R > 0)) throw std::invalid_argument("array radius must be positive");

  BoundaryEstimate est;
  est.array_type = type;
  est.radius = R;
  est.num_mics = M;
  est.coefficients = CoefficientSet(N, Vec3::Zero());
  const auto A = radial_response_all(type, N, std::abs(k) * R, opt.a);

  est.min_abs_response = std::abs(A[0]);
  for (int n = 1; n <= N; ++n) {
    if (std::abs(A[n]) < est.min_abs_response) {
      est.min_abs_response = std::abs(A[n]);
      est.min_response_order = n;
    }
  }

  CVector acc = CVector::Zero(num_coeffs(N));
  for (int m = 0; m < M; ++m) {
    const auto y = sph_harm_all(N, x[m]);
    for (int i = 0; i < acc.size(); ++i) acc(i) += w[m] * std::conj(y[i]) * s(m);
  }
  for (int n = 0; n <= N; ++n) {
    const bool weak = std::abs(A[n]) < opt.response_floor;
    if (weak) {
      est.weak_orders.push_back(n);
      est.warnings.push_back("order " + std::to_string(n) + ": |A| = " + std::to_string(std::abs(A[n])) +
                             " below floor, near a forbidden frequency");
    }
    for (int mu = -n; mu <= n; ++mu) {
      const int i = n * n + n + mu;
      est.coefficients.values(i) = (weak && opt.zero_weak_orders) ? Complex(0.0) : acc(i) / A[n];
    }
  }
  if (!est.truncation_rule_ok())
    est.warnings.push_back("(N+1)^2 exceeds the number of microphones");
  return est;
}

// Equal-weight estimate from microphones placed on a sphere about the origin.
inline BoundaryEstimate estimate_coefficients(const ObservationVector& obs, const ArrayConfig& array,
                                              ArrayType type, double k, int N,
                                              const BoundaryOptions& opt = {}) {
  const double R = array.mics.front().position.norm();
  std::vector<Vec3> x;
  for (const auto& mic : array.mics) x.push_back(mic.position / R);
  const std::vector<double> w(array.mics.size(), 1.0 / array.mics.size());
  return estimate_coefficients(obs.s, x, w, type, R, k, N, opt);
}

inline Complex reconstruct(const BoundaryEstimate& est, const Vec3& r, double k) {
  return eval_expansion(est.coefficients, r, k);
}

// Points outside the array sphere are extrapolated.
inline bool is_extrapolation(const BoundaryEstimate& est, const Vec3& r) {
  return r.norm() > est.radius * (1 + 1e-12);
}

struct ForbiddenFrequency {
  int nu = 0;
  double frequency = 0.0;
};

// Positive zeros of j_nu(2 pi f R / c) for nu <= nu_max and f <= f_max.
inline std::vector<ForbiddenFrequency> forbidden_frequencies(double R, double c, int nu_max, double f_max) {
  if (!(R > 0) || !(c > 0)) throw std::invalid_argument("radius and speed of sound must be positive");
  std::vector<ForbiddenFrequency> out;
  const double to_f = c / (2 * kPi * R);
  const double x_max = f_max / to_f;
  const double step = 0.05;
  for (int nu = 0; nu <= nu_max; ++nu) {
    double x0 = 1e-3, f0 = sph_bessel_j(nu, x0);
    for (double x1 = x0 + step; x0 < x_max; x1 += step) {
      const double f1 = sph_bessel_j(nu, x1);
      if (f0 != 0.0 && f0 * f1 <= 0.0) {
        double lo = x0, hi = x1, flo = f0;
        while ((hi - lo) * to_f > 1e-9) {
          const double mid = 0.5 * (lo + hi);
          const double fm = sph_bessel_j(nu, mid);
          if (flo * fm <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        const double f = 0.5 * (lo + hi) * to_f;
        if (f <= f_max) out.push_back({nu, f});
      }
      x0 = x1;
      f0 = f1;
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.frequency != b.frequency ? a.frequency < b.frequency : a.nu < b.nu;
  });
  return out;
}

namespace detail {

inline void check_dirichlet_args(const Vec3& r, const Vec3& rs, double R, double k, int N, double floor) {
  if (!(r.norm() < R)) throw std::invalid_argument("Dirichlet Green's function needs |r| < R");
  if (r.norm() > 0 && !(rs.norm() < R * R / r.norm()))
    throw std::invalid_argument("source lies outside the convergence ball R^2/|r|");
  // |j h| (kR)^2 is of order one away from zeros of j, for any order.
  const auto j = sph_bessel_j_all(N, k * R);
  const auto h = sph_hankel_h1_all(N, k * R);
  for (int n = 0; n <= N; ++n)
    if (std::abs(j[n]) * std::abs(h[n]) * (k * R) * (k * R) < floor)
      throw ForbiddenWavenumberError("j_" + std::to_string(n) + "(kR) vanishes: forbidden wavenumber");
}

inline double cos_angle(const Vec3& a, const Vec3& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

}  // namespace detail

// Per-order terms of v_D(r; rs) = -(ik/4pi) sum h_nu(kR)/j_nu(kR) conj(phi(rs)) phi(r).
inline std::vector<Complex> dirichlet_correction_terms(const Vec3& r, const Vec3& rs, double R, double k,
                                                       int N, double floor = 1e-10) {
  detail::check_dirichlet_args(r, rs, R, k, N, floor);
  const auto jR = sph_bessel_j_all(N, k * R);
  const auto hR = sph_hankel_h1_all(N, k * R);
  const auto jr = sph_bessel_j_all(N, k * r.norm());
  const auto js = sph_bessel_j_all(N, k * rs.norm());
  const double ct = detail::cos_angle(r, rs);
  std::vector<Complex> out(N + 1);
  for (int n = 0; n <= N; ++n)
    out[n] = -kI * k / (4 * kPi) * hR[n] / jR[n] * jr[n] * js[n] * (2.0 * n + 1) * std::legendre(n, ct);
  return out;
}

// G_D(r; rs) = G(r, rs) + v_D(r; rs), series truncated at N.
inline Complex dirichlet_green_sphere(const Vec3& r, const Vec3& rs, double R, double k, int N = 40,
                                     double floor = 1e-10) {
  Complex v = 0.0;
  for (const auto& t : dirichlet_correction_terms(r, rs, R, k, N, floor)) v += t;
  return green(r, rs, k) + v;
}

// Outward normal derivative of G_D(r; rs) in rs on the sphere |rs| = R.
inline Complex dirichlet_green_normal_derivative(const Vec3& r, const Vec3& x, double R, double k, int N = 40,
                                                 double floor = 1e-10) {
  detail::check_dirichlet_args(r, Vec3::Zero(), R, k, N, floor);
  const auto jR = sph_bessel_j_all(N, k * R);
  const auto djR = sph_bessel_j_deriv_all(N, k * R);
  const auto hR = sph_hankel_h1_all(N, k * R);
  const auto dhR = sph_hankel_h1_deriv_all(N, k * R);
  const auto jr = sph_bessel_j_all(N, k * r.norm());
  const double ct = detail::cos_angle(r, x);
  Complex acc = 0.0;
  for (int n = 0; n <= N; ++n)
    acc += (dhR[n] - hR[n] * djR[n] / jR[n]) * jr[n] * (2.0 * n + 1) * std::legendre(n, ct);
  return kI * k * k / (4 * kPi) * acc;
}

// u(r) = -4 pi R^2 sum_m w_m s_m dG_D/dn(r; R x_m), pressure microphones on the sphere.
inline Complex estimate_via_dirichlet_green(const CVector& s, const std::vector<Vec3>& x,
                                            const std::vector<double>& w, double R, double k, const Vec3& r,
                                            int N = 40) {
  Complex acc = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m)
    acc += w[m] * s(static_cast<int>(m)) * dirichlet_green_normal_derivative(r, x[m], R, k, N);
  return -4 * kPi * R * R * acc;
}

}  // namespace sfe
