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

#include <cmath>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "sfe/specfun.hpp"

namespace sfe {

struct Wavenumber {
  double k;
  explicit Wavenumber(double v) : k(v) {
    if (v == 0.0 || !std::isfinite(v)) throw std::invalid_argument("wavenumber must be nonzero");
  }
  operator double() const { return k; }
};

inline Wavenumber wavenumber_from_frequency(double f, double c) { return Wavenumber(2 * kPi * f / c); }

// Expansion coefficients about `origin` in the regular spherical wave basis.
struct CoefficientSet {
  int order = 0;
  Vec3 origin = Vec3::Zero();
  CVector values;

  CoefficientSet() : values(CVector::Zero(1)) {}
  CoefficientSet(int n, const Vec3& o) : order(n), origin(o), values(CVector::Zero(num_coeffs(n))) {}
  CoefficientSet(int n, const Vec3& o, CVector v) : order(n), origin(o), values(std::move(v)) {
    if (values.size() != num_coeffs(n)) throw std::invalid_argument("coefficient length mismatch");
  }

  Complex& operator()(int nu, int mu) { return values(OrderDegree{nu, mu}.flat()); }
  Complex operator()(int nu, int mu) const { return values(OrderDegree{nu, mu}.flat()); }

  CoefficientSet truncated(int n) const {
    CoefficientSet out(n, origin);
    const int m = std::min(num_coeffs(n), num_coeffs(order));
    out.values.head(m) = values.head(m);
    return out;
  }
};

inline void to_json(nlohmann::json& j, const CoefficientSet& c) {
  std::vector<double> re(c.values.size()), im(c.values.size());
  for (int i = 0; i < c.values.size(); ++i) {
    re[i] = c.values(i).real();
    im[i] = c.values(i).imag();
  }
  j = {{"order", c.order},
       {"origin", {c.origin.x(), c.origin.y(), c.origin.z()}},
       {"re", re},
       {"im", im}};
}

inline void from_json(const nlohmann::json& j, CoefficientSet& c) {
  const int n = j.at("order").get<int>();
  const auto o = j.at("origin").get<std::vector<double>>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (n < 0 || o.size() != 3 || re.size() != im.size() ||
      static_cast<int>(re.size()) != num_coeffs(n)) {
    throw std::invalid_argument("malformed coefficient set");
  }
  CVector v(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) v(i) = {re[i], im[i]};
  c = CoefficientSet(n, Vec3(o[0], o[1], o[2]), std::move(v));
}

inline Complex green(const Vec3& r, const Vec3& rs, double k) {
  const double d = (r - rs).norm();
  if (d < 1e-12) throw SingularityError("Green's function at coincident points");
  return std::exp(kI * (k * d)) / (4 * kPi * d);
}

inline Complex plane_wave(const Vec3& r, const Vec3& x, double k) {
  require_unit(x, "plane wave direction");
  return std::exp(-kI * (k * x.dot(r)));
}

// phi_{nu,mu}(r) for all nu <= order.
inline CVector regular_swf_all(int order, const Vec3& r, double k) {
  CVector out = CVector::Zero(num_coeffs(order));
  const double rn = r.norm();
  if (rn == 0.0) {
    out(0) = 1.0;
    return out;
  }
  const auto j = sph_bessel_j_all(order, k * rn);
  const auto y = sph_harm_all_unchecked(order, r);
  for (int n = 0; n <= order; ++n) {
    const Complex a = ipow(-n) * j[n];
    for (int m = -n; m <= n; ++m) out(n * n + n + m) = a * y[n * n + n + m];
  }
  return out;
}

inline Complex regular_swf(OrderDegree idx, const Vec3& r, double k) {
  return regular_swf_all(idx.nu, r, k)(idx.flat());
}

// psi_{nu,mu}(r) for all nu <= order.
inline CVector singular_swf_all(int order, const Vec3& r, double k) {
  const double rn = r.norm();
  if (rn == 0.0) throw SingularityError("singular spherical wave function at the origin");
  const auto h = sph_hankel_h1_all(order, k * rn);
  const auto y = sph_harm_all_unchecked(order, r);
  CVector out(num_coeffs(order));
  for (int n = 0; n <= order; ++n) {
    const Complex a = kI * k / (4 * kPi) * ipow(n) * h[n];
    for (int m = -n; m <= n; ++m) out(n * n + n + m) = a * std::conj(y[n * n + n + m]);
  }
  return out;
}

inline Complex singular_swf(OrderDegree idx, const Vec3& r, double k) {
  return singular_swf_all(idx.nu, r, k)(idx.flat());
}

inline int default_truncation(double k, double r_max) {
  return static_cast<int>(std::ceil(std::abs(k) * r_max)) + 10;
}

// T^{nu,mu}_{nu',mu'}(d): row (nu,mu) up to order_out, column (nu',mu') up to
// order_in. phi_{nu',mu'}(r + d) = sum_{nu,mu} T^{nu,mu}_{nu',mu'}(d) phi_{nu,mu}(r).
inline CMatrix translation_matrix(const Vec3& d, double k, int order_out, int order_in) {
  const int top = order_out + order_in;
  const CVector phi = regular_swf_all(top, d, k);
  CMatrix T = CMatrix::Zero(num_coeffs(order_out), num_coeffs(order_in));
  const bool at_origin = d.norm() == 0.0;
  for (int n = 0; n <= order_out; ++n) {
    for (int m = -n; m <= n; ++m) {
      for (int np = 0; np <= order_in; ++np) {
        for (int mp = -np; mp <= np; ++mp) {
          const int mpp = mp - m;
          Complex acc = 0.0;
          const int lo = std::max(std::abs(n - np), std::abs(mpp));
          for (int npp = lo + ((lo + n + np) % 2); npp <= n + np; npp += 2) {
            if (at_origin && npp > 0) break;
            acc += gaunt({n, m}, {np, mp}, {npp, mpp}) * phi(npp * npp + npp + mpp);
          }
          T(n * n + n + m, np * np + np + mp) = acc;
        }
      }
    }
  }
  return T;
}

// Re-expands c about new_origin, truncated at order_out.
inline CoefficientSet translate_coefficients(const CoefficientSet& c, const Vec3& new_origin,
                                             double k, int order_out) {
  const CMatrix T = translation_matrix(new_origin - c.origin, k, order_out, c.order);
  return CoefficientSet(order_out, new_origin, T * c.values);
}

// Coefficients of u'(r) = u(R r), expanded about the same origin.
inline CoefficientSet rotate_coefficients(const CoefficientSet& c, const Rotation3& rot) {
  CoefficientSet out(c.order, c.origin);
  for (int n = 0; n <= c.order; ++n) {
    const CMatrix D = wigner_d(n, rot);
    out.values.segment(n * n, 2 * n + 1) = D.adjoint() * c.values.segment(n * n, 2 * n + 1);
  }
  return out;
}

inline Complex eval_expansion(const CoefficientSet& c, const Vec3& r, double k) {
  return (regular_swf_all(c.order, r - c.origin, k).array() * c.values.array()).sum();
}

// Plane wave e^{-ik x.r} expanded about center.
inline CoefficientSet plane_wave_coefficients(const Vec3& x, double k, const Vec3& center,
                                              int order) {
  require_unit(x, "plane wave direction");
  const auto y = sph_harm_all_unchecked(order, x);
  const Complex ph = std::exp(-kI * (k * x.dot(center)));
  CoefficientSet c(order, center);
  for (int i = 0; i < c.values.size(); ++i) c.values(i) = ph * std::conj(y[i]);
  return c;
}

// Green's function G(.; rs) expanded about center; valid for |r - center| < |rs - center|.
inline CoefficientSet point_source_coefficients(const Vec3& rs, double k, const Vec3& center,
                                                int order) {
  return CoefficientSet(order, center, singular_swf_all(order, rs - center, k));
}

// Function on the unit sphere, stored as coefficients w of sum w_{nu,mu} Y_{nu,mu}(x).
struct DirectionalFunction {
  int order = 0;
  CVector coeffs = CVector::Zero(1);

  Complex operator()(const Vec3& x) const {
    const auto y = sph_harm_all(order, x);
    Complex acc = 0.0;
    for (int i = 0; i < coeffs.size(); ++i) acc += coeffs(i) * y[i];
    return acc;
  }
};

// Spherical wave coefficients of the Herglotz field integral w(x) e^{-ik x.r} dS.
inline CoefficientSet pw_to_sw(const DirectionalFunction& w, const Vec3& origin = Vec3::Zero()) {
  return CoefficientSet(w.order, origin, 4 * kPi * w.coeffs);
}

inline DirectionalFunction sw_to_pw(const CoefficientSet& c) {
  return DirectionalFunction{c.order, c.values / (4 * kPi)};
}

}  // namespace sfe
