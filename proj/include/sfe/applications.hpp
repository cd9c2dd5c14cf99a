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
#include <deque>
#include <functional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "sfe/specfun.hpp"
#include "sfe/types.hpp"

namespace sfe {

// Kernel for interpolating fields between control points. kSpherical is
// j0(k|r - r'|); kPlanar is J0(k |r - r'|) on in-plane distances, for
// two-dimensional regions.
enum class InterpolationKernel { kSpherical, kPlanar };

inline double kernel_value(InterpolationKernel kind, double k, const Vec3& a, const Vec3& b) {
  if (kind == InterpolationKernel::kSpherical) return sph_bessel_j(0, k * (a - b).norm());
  return std::cyl_bessel_j(0.0, k * (a - b).head<2>().norm());
}

inline RMatrix kernel_matrix(InterpolationKernel kind, double k, const std::vector<Vec3>& a,
                             const std::vector<Vec3>& b) {
  RMatrix K(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) K(i, j) = kernel_value(kind, k, a[i], b[j]);
  return K;
}

// Midpoint-rule cells over an axis-aligned box. A zero-thickness axis gives
// an area (or length) measure instead of a volume.
struct RegionQuadrature {
  std::vector<Vec3> points;
  std::vector<double> weights;

  static RegionQuadrature box(const Vec3& lo, const Vec3& hi, double h) {
    if (!(h > 0)) throw std::invalid_argument("quadrature spacing must be positive");
    int n[3];
    double step[3];
    for (int a = 0; a < 3; ++a) {
      const double len = hi(a) - lo(a);
      if (len < 0) throw std::invalid_argument("box bounds are reversed");
      n[a] = len == 0 ? 1 : std::max(1, static_cast<int>(std::lround(len / h)));
      step[a] = len == 0 ? 1.0 : len / n[a];
    }
    RegionQuadrature q;
    const double w = step[0] * step[1] * step[2];
    for (int i = 0; i < n[0]; ++i)
      for (int j = 0; j < n[1]; ++j)
        for (int l = 0; l < n[2]; ++l) {
          Vec3 p;
          const int idx[3] = {i, j, l};
          for (int a = 0; a < 3; ++a) p(a) = hi(a) == lo(a) ? lo(a) : lo(a) + (idx[a] + 0.5) * step[a];
          q.points.push_back(p);
          q.weights.push_back(w);
        }
    return q;
  }

  double measure() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }
};

struct ControlRegion {
  Vec3 lo = Vec3::Zero(), hi = Vec3::Zero();
  std::vector<Vec3> control_points;
  RegionQuadrature quadrature;

  static ControlRegion box(const Vec3& lo, const Vec3& hi, std::vector<Vec3> control_points, double h = 0.02) {
    ControlRegion r{lo, hi, std::move(control_points), RegionQuadrature::box(lo, hi, h)};
    r.validate();
    return r;
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array() - 1e-12).all() && (p.array() <= hi.array() + 1e-12).all();
  }
  void validate() const {
    if (control_points.empty()) throw std::invalid_argument("control region has no control points");
    for (const auto& p : control_points)
      if (!contains(p)) throw std::invalid_argument("control point outside the target region");
  }
};

// Integral over the region of conj(z(r)) z(r)^T with z(r)^T = kappa(r)^T (K + lambda I)^-1,
// kappa and K built on `points`.
inline CMatrix interpolation_weighting(const std::vector<Vec3>& points, const RegionQuadrature& quad, double k,
                                       double lambda, InterpolationKernel kernel = InterpolationKernel::kSpherical) {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  const int n = static_cast<int>(points.size());
  RMatrix K = kernel_matrix(kernel, k, points, points);
  K.diagonal().array() += lambda;
  const RMatrix P = K.llt().solve(RMatrix::Identity(n, n));
  const RMatrix kap = kernel_matrix(kernel, k, quad.points, points);
  RMatrix S = RMatrix::Zero(n, n);
  for (std::size_t q = 0; q < quad.points.size(); ++q) S += quad.weights[q] * kap.row(q).transpose() * kap.row(q);
  const RMatrix A = P.transpose() * S * P;
  return (0.5 * (A + A.transpose())).cast<Complex>();
}

inline CMatrix region_weighting(const ControlRegion& region, double k, double lambda,
                                InterpolationKernel kernel = InterpolationKernel::kSpherical) {
  return interpolation_weighting(region.control_points, region.quadrature, k, lambda, kernel);
}

// A = P^H [int kappa^* kappa^T dV] P with P = (K + lambda I)^-1 on the error microphones.
inline CMatrix anc_region_weighting(const std::vector<Vec3>& mics, const RegionQuadrature& region, double k,
                                    double lambda, InterpolationKernel kernel = InterpolationKernel::kSpherical) {
  return interpolation_weighting(mics, region, k, lambda, kernel);
}

// Free-field Green's function matrix, receivers by sources.
inline CMatrix transfer_matrix(const std::vector<Vec3>& receivers, const std::vector<Vec3>& sources, double k) {
  CMatrix G(receivers.size(), sources.size());
  for (std::size_t i = 0; i < receivers.size(); ++i)
    for (std::size_t j = 0; j < sources.size(); ++j) {
      const double d = (receivers[i] - sources[j]).norm();
      if (d < 1e-12) throw SingularityError("receiver coincides with a source");
      G(i, j) = std::exp(kI * (k * d)) / (4 * kPi * d);
    }
  return G;
}

// d = (G^H W G + eta I)^-1 G^H W u.
inline CVector wpm_drive(const CMatrix& G, const CVector& u_des, const CMatrix& W, double eta) {
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  CMatrix S = G.adjoint() * W * G;
  S.diagonal().array() += eta;
  return S.ldlt().solve(G.adjoint() * (W * u_des));
}

// d = (G^H G + eta I)^-1 G^H u.
inline CVector pm_drive(const CMatrix& G, const CVector& u_des, double eta) {
  return wpm_drive(G, u_des, CMatrix::Identity(G.rows(), G.rows()), eta);
}

// W <- W - mu G^H A e x^H.
inline CMatrix anc_update_freq(const CMatrix& W, const CVector& x, const CVector& e, const CMatrix& G,
                               const CMatrix& A, double mu) {
  if (!(mu > 0)) throw std::invalid_argument("step size must be positive");
  return W - mu * (G.adjoint() * (A * e)) * x.adjoint();
}

// Single-reference tonal ANC: e = d + G w, cost J = e^H A e.
struct AncProblem {
  CMatrix G;  // error microphones by secondary sources
  CVector d;  // primary noise at the error microphones
  CMatrix A;

  CVector error(const CVector& w) const { return d + G * w; }
  double cost(const CVector& w) const {
    const CVector e = error(w);
    return e.dot(A * e).real();
  }
  // dJ/d conj(w); the real-parameter gradient is 2 Re and 2 Im of this.
  CVector gradient(const CVector& w) const { return G.adjoint() * (A * error(w)); }
  // Stationary point of the LMS iteration.
  CVector converged(double eta = 0.0) const {
    CMatrix S = G.adjoint() * A * G;
    S.diagonal().array() += eta;
    return -S.ldlt().solve(G.adjoint() * (A * d));
  }
  double max_step() const {
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(G.adjoint() * A * G);
    return 2.0 / es.eigenvalues().maxCoeff();
  }
  CVector step(const CVector& w, double mu) const {
    return anc_update_freq(w, CVector::Ones(1), error(w), G, A, mu).col(0);
  }
};

// Points on the perimeter of a square of side 2*half centred on the z axis,
// starting at (-half, -half) and running counter-clockwise.
inline std::vector<Vec3> square_perimeter(int n, double half, double z = 0.0) {
  std::vector<Vec3> out;
  const double per = 8 * half;
  for (int i = 0; i < n; ++i) {
    const double s = i * per / n;
    const int side = static_cast<int>(s / (2 * half)) % 4;
    const double t = s - side * 2 * half;
    const double xy[4][2] = {{-half + t, -half}, {half, -half + t}, {half - t, half}, {-half, half - t}};
    out.emplace_back(xy[side][0], xy[side][1], z);
  }
  return out;
}

// Moves every other point outward along the square's normal; corners use the diagonal.
inline std::vector<Vec3> shift_alternate_outward(std::vector<Vec3> pts, double half, double amount) {
  for (std::size_t i = 1; i < pts.size(); i += 2) {
    Vec3 n = Vec3::Zero();
    for (int a = 0; a < 2; ++a)
      if (std::abs(std::abs(pts[i](a)) - half) < 1e-9) n(a) = pts[i](a) > 0 ? 1.0 : -1.0;
    if (n.norm() > 0) pts[i] += amount * n.normalized();
  }
  return pts;
}

// ---- time domain ----

// Multichannel FIR: taps[i] is rows by cols.
struct FirMatrix {
  std::vector<RMatrix> taps;

  int length() const { return static_cast<int>(taps.size()); }
  int rows() const { return taps.empty() ? 0 : static_cast<int>(taps[0].rows()); }
  int cols() const { return taps.empty() ? 0 : static_cast<int>(taps[0].cols()); }
  CMatrix response(double omega) const {
    CMatrix out = CMatrix::Zero(rows(), cols());
    for (int i = 0; i < length(); ++i) out += std::exp(-kI * (omega * i)) * taps[i].cast<Complex>();
    return out;
  }
};

// Free-field paths with the propagation delay rounded to the nearest sample.
inline FirMatrix free_field_fir(const std::vector<Vec3>& receivers, const std::vector<Vec3>& sources, double fs,
                                double c) {
  int len = 1;
  std::vector<std::vector<std::pair<int, double>>> path(receivers.size());
  for (std::size_t i = 0; i < receivers.size(); ++i)
    for (std::size_t j = 0; j < sources.size(); ++j) {
      const double d = (receivers[i] - sources[j]).norm();
      if (d < 1e-12) throw SingularityError("receiver coincides with a source");
      const int delay = static_cast<int>(std::lround(d / c * fs));
      path[i].push_back({delay, 1.0 / (4 * kPi * d)});
      len = std::max(len, delay + 1);
    }
  FirMatrix g;
  g.taps.assign(len, RMatrix::Zero(receivers.size(), sources.size()));
  for (std::size_t i = 0; i < receivers.size(); ++i)
    for (std::size_t j = 0; j < sources.size(); ++j) g.taps[path[i][j].first](i, j) = path[i][j].second;
  return g;
}

// Non-causal weighting A(k), |k| <= K, stored as taps[k + K].
struct WeightingFilter {
  int K = 0;
  std::vector<RMatrix> taps;

  static WeightingFilter identity(int M) { return {0, {RMatrix::Identity(M, M)}}; }
  // sum_k A(k) e^{-i omega k}.
  CMatrix response(double omega) const {
    CMatrix out = CMatrix::Zero(taps[0].rows(), taps[0].cols());
    for (int i = 0; i <= 2 * K; ++i) out += std::exp(-kI * (omega * (i - K))) * taps[i].cast<Complex>();
    return out;
  }
};

// A(k) from A(omega) sampled at `bins` DFT frequencies, assuming the two-index
// weighting depends only on the lag. Truncated at the smallest K whose discarded
// energy is below `tail` of the total.
inline WeightingFilter weighting_filter(const std::function<CMatrix(double)>& a_of_omega, int bins,
                                        double tail = 0.01) {
  if (bins < 2 || bins % 2) throw std::invalid_argument("bin count must be even");
  std::vector<CMatrix> Aw(bins);
  for (int j = 0; j <= bins / 2; ++j) Aw[j] = a_of_omega(2 * kPi * j / bins);
  for (int j = bins / 2 + 1; j < bins; ++j) Aw[j] = Aw[bins - j].conjugate();
  const int M = static_cast<int>(Aw[0].rows());
  std::vector<RMatrix> full(bins);
  double total = 0.0;
  for (int lag = 0; lag < bins; ++lag) {
    CMatrix acc = CMatrix::Zero(M, M);
    for (int j = 0; j < bins; ++j) acc += std::exp(kI * (2 * kPi * j * lag / bins)) * Aw[j];
    full[lag] = acc.real() / bins;
    total += full[lag].squaredNorm();
  }
  auto at = [&](int k) -> const RMatrix& { return full[(k % bins + bins) % bins]; };
  WeightingFilter out;
  double kept = at(0).squaredNorm();
  while (total - kept >= tail * total && out.K < bins / 2 - 1) {
    ++out.K;
    kept += at(out.K).squaredNorm() + at(-out.K).squaredNorm();
  }
  for (int k = -out.K; k <= out.K; ++k) out.taps.push_back(at(k));
  return out;
}

// Multichannel FxLMS with a regional weighting. W(i) is L x R for i < I.
class FxLmsController {
 public:
  FxLmsController(int num_sources, int num_refs, int length, const FirMatrix& secondary,
                  const WeightingFilter& weighting, double mu)
      : L_(num_sources), R_(num_refs), K_(weighting.K), mu_(mu),
        W_(length, RMatrix::Zero(num_sources, num_refs)) {
    if (!(mu > 0)) throw std::invalid_argument("step size must be positive");
    if (length < 1) throw std::invalid_argument("filter length must be positive");
    // H(i) = sum_j A(j) G(i - j).
    const int J = secondary.length();
    const int M = secondary.rows();
    H_.assign(J + 2 * K_, RMatrix::Zero(M, L_));
    for (int i = 0; i < static_cast<int>(H_.size()); ++i)
      for (int j = 0; j <= 2 * K_; ++j)
        if (i - j >= 0 && i - j < J) H_[i] += weighting.taps[j] * secondary.taps[i - j];
    x_hist_.assign(length + H_.size(), Eigen::VectorXd::Zero(R_));
    e_hist_.assign(K_ + 1, Eigen::VectorXd::Zero(M));
  }

  const std::vector<RMatrix>& filters() const { return W_; }
  const std::vector<RMatrix>& filtered_path() const { return H_; }
  int delay() const { return K_; }

  // Pushes x(n) and returns the drive y(n) = sum_i W(i) x(n - i).
  Eigen::VectorXd drive(const Eigen::VectorXd& x) {
    x_hist_.pop_back();
    x_hist_.push_front(x);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(L_);
    for (int i = 0; i < static_cast<int>(W_.size()); ++i) y += W_[i] * x_hist_[i];
    return y;
  }

  // W(i) <- W(i) - mu sum_j H(j)^T e(n - K) x(n - i - j)^T, after drive() for sample n.
  void update(const Eigen::VectorXd& e) {
    e_hist_.pop_back();
    e_hist_.push_front(e);
    const Eigen::VectorXd& ed = e_hist_[K_];
    if (ed.isZero(0.0)) return;
    std::vector<Eigen::VectorXd> f(H_.size());
    for (std::size_t j = 0; j < H_.size(); ++j) f[j] = H_[j].transpose() * ed;
    for (int i = 0; i < static_cast<int>(W_.size()); ++i)
      for (std::size_t j = 0; j < H_.size(); ++j) W_[i] -= mu_ * f[j] * x_hist_[i + j].transpose();
  }

  // sum_i W(i) e^{-i omega i}.
  CMatrix response(double omega) const {
    CMatrix out = CMatrix::Zero(L_, R_);
    for (int i = 0; i < static_cast<int>(W_.size()); ++i) out += std::exp(-kI * (omega * i)) * W_[i].cast<Complex>();
    return out;
  }

 private:
  int L_, R_, K_;
  double mu_;
  std::vector<RMatrix> W_;
  std::vector<RMatrix> H_;
  std::deque<Eigen::VectorXd> x_hist_;
  std::deque<Eigen::VectorXd> e_hist_;
};

// Runs the controller on a single reference signal. Primary and secondary
// paths are FIRs to the error microphones. Returns mean |e|^2 per block.
inline std::vector<double> run_fxlms(FxLmsController& ctl, const std::vector<double>& x, const FirMatrix& primary,
                                     const FirMatrix& secondary, int block = 1000) {
  const int M = secondary.rows();
  std::deque<Eigen::VectorXd> y_hist(secondary.length(), Eigen::VectorXd::Zero(secondary.cols()));
  std::deque<double> x_hist(primary.length(), 0.0);
  std::vector<double> power;
  double acc = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    x_hist.pop_back();
    x_hist.push_front(x[n]);
    y_hist.pop_back();
    y_hist.push_front(ctl.drive(Eigen::VectorXd::Constant(1, x[n])));
    Eigen::VectorXd e = Eigen::VectorXd::Zero(M);
    for (int i = 0; i < primary.length(); ++i) e += primary.taps[i].col(0) * x_hist[i];
    for (int j = 0; j < secondary.length(); ++j) e += secondary.taps[j] * y_hist[j];
    ctl.update(e);
    acc += e.squaredNorm() / M;
    if ((n + 1) % block == 0) {
      power.push_back(acc / block);
      acc = 0.0;
    }
  }
  return power;
}

}  // namespace sfe
