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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "sfe/observation.hpp"
#include "sfe/wavefuncs.hpp"

namespace sfe {

// Spherical wave basis phi_{nu,mu}(r - r0) up to `order`, or plane waves
// e^{-ik x_n.(r - r0)}.
struct BasisSpec {
  enum class Kind { kSphericalWave, kPlaneWave };
  Kind kind = Kind::kSphericalWave;
  Vec3 origin = Vec3::Zero();
  int order = 7;
  std::vector<Vec3> directions;

  static BasisSpec spherical(const Vec3& origin, int order) {
    if (order < 0) throw std::invalid_argument("basis order must be non-negative");
    return {Kind::kSphericalWave, origin, order, {}};
  }
  static BasisSpec plane(const Vec3& origin, std::vector<Vec3> directions) {
    for (const auto& x : directions) require_unit(x, "plane-wave basis direction");
    return {Kind::kPlaneWave, origin, 0, std::move(directions)};
  }
  int size() const {
    return kind == Kind::kSphericalWave ? num_coeffs(order) : static_cast<int>(directions.size());
  }
};

struct Regularization {
  double lambda = 1e-3;
  double sigma2 = 1.0;           // Sigma = sigma2 * I unless `sigma` is set
  std::optional<CMatrix> sigma;  // full Hermitian positive definite

  CMatrix sigma_matrix(int M) const {
    if (sigma) {
      if (sigma->rows() != M || sigma->cols() != M) throw std::invalid_argument("Sigma has wrong size");
      return *sigma;
    }
    return sigma2 * CMatrix::Identity(M, M);
  }
  void validate() const {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    if (!sigma && !(sigma2 > 0)) throw std::invalid_argument("sigma2 must be positive");
  }
};

// Coefficients of the microphone directivity, as a set about the microphone.
inline CoefficientSet directivity_set(const Microphone& mic) {
  return CoefficientSet(mic.directivity.max_order, mic.position, mic.directivity.d);
}

// B_{m,n}: output of microphone m for basis function n.
inline CMatrix build_B(const ArrayConfig& array, const BasisSpec& basis, double k) {
  const int M = array.size();
  CMatrix B(M, basis.size());
  for (int m = 0; m < M; ++m) {
    const auto& mic = array.mics[m];
    if (basis.kind == BasisSpec::Kind::kSphericalWave) {
      if (mic.directivity.max_order == 0) {
        B.row(m) = regular_swf_all(basis.order, mic.position - basis.origin, k).transpose();
      } else {
        const CMatrix T =
            translation_matrix(mic.position - basis.origin, k, mic.directivity.max_order, basis.order);
        B.row(m) = mic.directivity.d.adjoint() * T;
      }
    } else {
      for (int n = 0; n < basis.size(); ++n) {
        const Vec3& x = basis.directions[n];
        B(m, n) = observe_plane_wave(mic, x, k) * std::exp(kI * (k * x.dot(basis.origin)));
      }
    }
  }
  return B;
}

// c = (B^H Sigma^-1 B + lambda I)^-1 B^H Sigma^-1 s, N x N solve.
inline CVector solve_tikhonov_primal(const CMatrix& B, const CVector& s, const Regularization& reg) {
  reg.validate();
  if (B.rows() != s.size()) throw std::invalid_argument("B and s sizes differ");
  const int N = static_cast<int>(B.cols());
  CMatrix SiB;
  CVector Sis;
  if (reg.sigma) {
    Eigen::LLT<CMatrix> llt(reg.sigma_matrix(static_cast<int>(B.rows())));
    if (llt.info() != Eigen::Success) throw std::runtime_error("Sigma is not positive definite");
    SiB = llt.solve(B);
    Sis = llt.solve(s);
  } else {
    SiB = B / reg.sigma2;
    Sis = s / reg.sigma2;
  }
  CMatrix G = B.adjoint() * SiB;
  G.diagonal().array() += reg.lambda;
  Eigen::LLT<CMatrix> llt(G);
  if (llt.info() != Eigen::Success) throw std::runtime_error("Tikhonov system is not positive definite");
  CVector c = llt.solve(B.adjoint() * Sis);
  if (!c.allFinite()) throw std::runtime_error("Tikhonov solve produced non-finite values");
  return c;
}

// Same estimate via B^H (B B^H + lambda Sigma)^-1 s, M x M solve.
inline CVector solve_tikhonov_dual(const CMatrix& B, const CVector& s, const Regularization& reg) {
  reg.validate();
  if (B.rows() != s.size()) throw std::invalid_argument("B and s sizes differ");
  CMatrix G = B * B.adjoint() + reg.lambda * reg.sigma_matrix(static_cast<int>(B.rows()));
  Eigen::LLT<CMatrix> llt(G);
  if (llt.info() != Eigen::Success) throw std::runtime_error("Tikhonov system is not positive definite");
  CVector c = B.adjoint() * llt.solve(s);
  if (!c.allFinite()) throw std::runtime_error("Tikhonov solve produced non-finite values");
  return c;
}

inline CVector solve_tikhonov(const CMatrix& B, const CVector& s, const Regularization& reg = {}) {
  return B.cols() <= B.rows() ? solve_tikhonov_primal(B, s, reg) : solve_tikhonov_dual(B, s, reg);
}

inline Complex eval_finite(const CVector& c, const BasisSpec& basis, const Vec3& r, double k) {
  if (c.size() != basis.size()) throw std::invalid_argument("coefficient count does not match basis");
  if (basis.kind == BasisSpec::Kind::kSphericalWave)
    return (regular_swf_all(basis.order, r - basis.origin, k).array() * c.array()).sum();
  Complex acc = 0.0;
  for (int n = 0; n < c.size(); ++n) acc += c(n) * plane_wave(r - basis.origin, basis.directions[n], k);
  return acc;
}

// K_{m1,m2} = <v_m1, v_m2> = d_m1^H T(r_m1 - r_m2) d_m2.
inline CMatrix build_K(const ArrayConfig& array, double k) {
  const int M = array.size();
  CMatrix K(M, M);
  if (array.all_omni()) {
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b)
        K(a, b) = sph_bessel_j(0, k * (array.mics[a].position - array.mics[b].position).norm());
    return K;
  }
  for (int a = 0; a < M; ++a) {
    const auto& ma = array.mics[a];
    for (int b = a; b < M; ++b) {
      const auto& mb = array.mics[b];
      const CMatrix T = translation_matrix(ma.position - mb.position, k, ma.directivity.max_order,
                                           mb.directivity.max_order);
      K(a, b) = ma.directivity.d.dot(T * mb.directivity.d);
      K(b, a) = std::conj(K(a, b));
    }
  }
  return K;
}

struct KernelWeights {
  CVector alpha;
  double rcond = 1.0;  // reciprocal condition estimate of K + lambda Sigma
  bool ill_conditioned = false;
};

// alpha = (K + lambda Sigma)^-1 s.
inline KernelWeights solve_kernel(const CMatrix& K, const CVector& s, const Regularization& reg = {},
                                  double rcond_floor = 1e-14) {
  reg.validate();
  if (K.rows() != s.size() || K.cols() != s.size()) throw std::invalid_argument("K and s sizes differ");
  const CMatrix G = K + reg.lambda * reg.sigma_matrix(static_cast<int>(K.rows()));
  KernelWeights out;
  Eigen::LLT<CMatrix> llt(G);
  if (llt.info() == Eigen::Success) {
    out.alpha = llt.solve(s);
    out.rcond = llt.rcond();
  } else {
    // Not numerically positive definite.
    out.alpha = Eigen::LDLT<CMatrix>(G).solve(s);
    out.rcond = 0.0;
  }
  out.ill_conditioned = !(out.rcond > rcond_floor) || !out.alpha.allFinite();
  return out;
}

// u(r) = sum_m alpha_m v_m(r); v_m is the directivity expansion about r_m.
inline Complex eval_kernel(const CVector& alpha, const ArrayConfig& array, const Vec3& r, double k) {
  Complex acc = 0.0;
  for (int m = 0; m < array.size(); ++m) {
    const auto& mic = array.mics[m];
    if (mic.directivity.max_order == 0)
      acc += alpha(m) * mic.directivity.d(0) * sph_bessel_j(0, k * (r - mic.position).norm());
    else
      acc += alpha(m) * eval_expansion(directivity_set(mic), r, k);
  }
  return acc;
}

// Expansion coefficients of the kernel estimate about r0.
inline CoefficientSet extract_expansion(const CVector& alpha, const ArrayConfig& array, const Vec3& r0,
                                        int order, double k) {
  CoefficientSet out(order, r0);
  for (int m = 0; m < array.size(); ++m)
    out.values += alpha(m) * translate_coefficients(directivity_set(array.mics[m]), r0, k, order).values;
  return out;
}

// Relative Frobenius distance between B B^H for a spherical basis of order N0
// about r0 and the exact kernel matrix.
inline double finite_to_infinite_gap(const ArrayConfig& array, double k, int order, const Vec3& r0) {
  const CMatrix B = build_B(array, BasisSpec::spherical(r0, order), k);
  const CMatrix K = build_K(array, k);
  return (B * B.adjoint() - K).norm() / K.norm();
}

}  // namespace sfe
