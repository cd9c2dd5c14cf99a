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

// Independent reference implementations used only by the tests.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sfe/types.hpp"

namespace oracle {

using sfe::Complex;
using sfe::Vec3;

struct SpherePoint {
  Vec3 dir;
  double weight;  // sums to 4 pi
};

// Gauss-Legendre (in cos theta) times uniform azimuth. Exact for spherical
// polynomials of degree < min(2 * 32, n_phi).
inline std::vector<SpherePoint> sphere_quadrature(int n_phi = 72) {
  using Rule = boost::math::quadrature::gauss<double, 32>;
  std::vector<double> x, w;
  for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
    const double a = Rule::abscissa()[i];
    const double b = Rule::weights()[i];
    x.push_back(a);
    w.push_back(b);
    if (a != 0.0) {
      x.push_back(-a);
      w.push_back(b);
    }
  }
  std::vector<SpherePoint> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double st = std::sqrt(1.0 - x[i] * x[i]);
    for (int j = 0; j < n_phi; ++j) {
      const double ph = 2.0 * sfe::kPi * j / n_phi;
      pts.push_back({Vec3(st * std::cos(ph), st * std::sin(ph), x[i]),
                     w[i] * 2.0 * sfe::kPi / n_phi});
    }
  }
  return pts;
}

template <class F>
auto integrate_sphere(F&& f, int n_phi = 72) {
  decltype(f(Vec3::UnitZ())) acc{};
  for (const auto& p : sphere_quadrature(n_phi)) acc += p.weight * f(p.dir);
  return acc;
}

// Racah formula in 50-digit binary floating point.
inline double wigner_3j_mp(int j1, int j2, int j3, int m1, int m2, int m3) {
  using R = boost::multiprecision::cpp_bin_float_50;
  if (m1 + m2 + m3 != 0 || j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  auto fact = [](int n) {
    R r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
  };
  R tri = fact(j1 + j2 - j3) * fact(j1 - j2 + j3) * fact(-j1 + j2 + j3) / fact(j1 + j2 + j3 + 1);
  R pre = sqrt(tri * fact(j1 + m1) * fact(j1 - m1) * fact(j2 + m2) * fact(j2 - m2) *
               fact(j3 + m3) * fact(j3 - m3));
  R sum = 0;
  for (int k = 0; k <= j1 + j2 + j3; ++k) {
    const int a[6] = {k, j3 - j2 + k + m1, j3 - j1 + k - m2, j1 + j2 - j3 - k, j1 - k - m1,
                      j2 - k + m2};
    bool ok = true;
    for (int v : a) ok = ok && v >= 0;
    if (!ok) continue;
    R den = 1;
    for (int v : a) den *= fact(v);
    sum += ((k % 2) ? R(-1) : R(1)) / den;
  }
  R val = pre * sum;
  if ((j1 - j2 - m3) % 2) val = -val;
  return static_cast<double>(val);
}

// Plain power series of j_nu, fifty terms.
inline double sph_bessel_series50(int nu, double x) {
  long double t = 1;
  for (int i = 1; i <= nu; ++i) t *= x / (2.0L * i + 1);
  long double sum = t;
  for (int k = 1; k < 50; ++k) {
    t *= -(long double)x * x / 2 / (k * (2.0L * nu + 2 * k + 1));
    sum += t;
  }
  return static_cast<double>(sum);
}

// Generic kernel ridge regression: alpha = (K + lambda I)^-1 s with an
// arbitrary kernel callable, using a plain LU solve.
inline sfe::CVector krr_weights(const std::vector<Vec3>& x,
                                const std::function<Complex(const Vec3&, const Vec3&)>& kern,
                                const sfe::CVector& s, double lambda) {
  const int m = static_cast<int>(x.size());
  sfe::CMatrix K(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) K(i, j) = kern(x[i], x[j]);
  K += lambda * sfe::CMatrix::Identity(m, m);
  return K.partialPivLu().solve(s);
}

}  // namespace oracle
