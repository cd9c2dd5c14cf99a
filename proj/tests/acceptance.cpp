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

// Acceptance run: one PASS/FAIL line per criterion, details indented below.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sfe/harness.hpp"

#ifndef SFE_SOURCE_DIR
#define SFE_SOURCE_DIR "."
#endif

namespace {

using namespace sfe;
namespace fs = std::filesystem;

// Pinned tolerances.
constexpr double kForbiddenTol = 0.5;           // Hz
constexpr double kForbiddenTime = 1.0;          // s
constexpr double kBmThreshold = -15.0;          // dB
constexpr double kSpikeMargin = 10.0;           // dB
constexpr double kAgreement300 = 3.0;           // dB
constexpr double kBmTime = 120.0;               // s
constexpr double kDmAgreement = 1.0;            // dB
constexpr double kIrregularThreshold = -5.0;    // dB
constexpr double kPlateauSlack = 0.1;           // dB
constexpr double kDmTime = 300.0;               // s
constexpr double kTikhonovTol = 1e-10;
constexpr double kKrrTol = 1e-12;
constexpr double kKernelGapTol = 1e-6;
constexpr double kWronskianTol = 1e-10;
constexpr double kOrthoTol = 1e-10;
constexpr double kAdditionTol = 1e-8;
constexpr double kUnitarityTol = 1e-10;
constexpr double kSpecfunTime = 60.0;           // s
constexpr double kSynthTime = 120.0;            // s
constexpr double kGradientTol = 1e-6;
constexpr double kAncTime = 180.0;              // s

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

fs::path scenario(const char* name) { return fs::path(SFE_SOURCE_DIR) / "scenarios" / name; }

json read(const fs::path& p) { return detail::read_json_file(p, ""); }

std::string sweep_csv(const std::vector<ResultRecord>& r) {
  std::ostringstream os;
  write_results_csv(os, r);
  return os.str();
}

std::string synth_csv(const std::vector<SynthesisRecord>& r) {
  std::ostringstream os;
  write_synthesis_csv(os, r);
  return os.str();
}

std::string anc_csv(const std::vector<AncRecord>& r) {
  std::ostringstream os;
  write_anc_csv(os, r);
  return os.str();
}

std::string forbidden_csv(const std::vector<ForbiddenFrequency>& f) {
  std::ostringstream os;
  os << "nu,frequency\n";
  for (const auto& x : f) os << x.nu << ',' << fmt17(x.frequency) << '\n';
  return os.str();
}

// First-run outputs, kept for the determinism check.
std::map<std::string, std::string> g_first_run;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec3 random_unit(std::mt19937_64& g) {
  std::normal_distribution<double> n;
  return Vec3(n(g), n(g), n(g)).normalized();
}

CMatrix random_cmatrix(std::mt19937_64& g, int r, int c) {
  std::normal_distribution<double> n;
  CMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = Complex(n(g), n(g));
  return m;
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2 * l - 1) * z * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2 / ((1 - z * z) * dp * dp);
  }
}

// ---- 1 ----
Outcome forbidden() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = forbidden_frequencies(1.0, 340.65, 7, 1000.0);
  const double t = seconds_since(t0);
  g_first_run["forbidden.csv"] = forbidden_csv(f);
  for (double target : {170.32, 243.62, 312.47}) {
    double best = 1e300, at = 0;
    for (const auto& x : f)
      if (std::abs(x.frequency - target) < best) best = std::abs(x.frequency - target), at = x.frequency;
    o.check(best <= kForbiddenTol, fmt("%.2f Hz: nearest %.4f Hz", target, at));
  }
  o.check(t < kForbiddenTime, fmt("runtime %.3f s", t));
  return o;
}

// ---- 2 ----
Outcome boundary_reproduction() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto recs = run_sweep(load_scenario(scenario("bm_sphere.json")));
  const double t = seconds_since(t0);
  g_first_run["bm_sphere.csv"] = sweep_csv(recs);
  auto nmse = [&](double f, const char* id) { return find_record(recs, f, id).mean_nmse_db; };
  for (const char* id : {"BM-first", "BM-rigid"})
    for (double f : {100.0, 200.0, 300.0, 400.0, 500.0})
      o.check(nmse(f, id) <= kBmThreshold, std::string(id) + fmt(" %.0f Hz: %.2f dB", f, nmse(f, id)));
  const double spike = nmse(310, "BM-omni") - nmse(310, "BM-rigid");
  o.check(spike >= kSpikeMargin, fmt("310 Hz BM-omni minus BM-rigid: %.2f dB (omni %.2f, rigid %.2f)", spike,
                                     nmse(310, "BM-omni"), nmse(310, "BM-rigid")));
  const double a = nmse(300, "BM-omni"), b = nmse(300, "BM-first"), c = nmse(300, "BM-rigid");
  const double spread = std::max({a, b, c}) - std::min({a, b, c});
  o.check(spread <= kAgreement300, fmt("300 Hz spread %.2f dB (omni %.2f, first %.2f, rigid %.2f)", spread, a, b, c));
  o.check(t < kBmTime, fmt("runtime %.1f s", t));
  return o;
}

// ---- 3 ----
Outcome discrete_reproduction() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto first = run_sweep(load_scenario(scenario("dm_spherical_first.json")));
  const auto irregular = run_sweep(load_scenario(scenario("dm_irregular_omni.json")));
  const auto trunc = run_sweep(load_scenario(scenario("dm_truncation.json")));
  const double t = seconds_since(t0);
  g_first_run["dm_spherical_first.csv"] = sweep_csv(first);
  g_first_run["dm_irregular_omni.csv"] = sweep_csv(irregular);
  g_first_run["dm_truncation.csv"] = sweep_csv(trunc);

  for (double f : {100.0, 200.0, 300.0, 400.0}) {
    const double a = find_record(first, f, "DM-finite").mean_nmse_db;
    const double b = find_record(first, f, "DM-infinite").mean_nmse_db;
    o.check(std::abs(a - b) <= kDmAgreement, fmt("first-order sphere %.0f Hz: finite %.2f, infinite %.2f dB", f, a, b));
  }
  for (const char* id : {"DM-finite", "DM-infinite"}) {
    const double v = find_record(irregular, 300, id).mean_nmse_db;
    o.check(std::isfinite(v) && v <= kIrregularThreshold, std::string("irregular omni 300 Hz ") + id + fmt(": %.2f dB", v));
  }
  std::vector<double> curve;
  for (int n = 0; n <= 15; ++n) {
    char id[40];
    std::snprintf(id, sizeof id, "DM-finite-pos1-N%02d", n);
    curve.push_back(find_record(trunc, 300, id).mean_nmse_db);
  }
  double worst_rise = -1e300;
  for (std::size_t n = 1; n < curve.size(); ++n) worst_rise = std::max(worst_rise, curve[n] - curve[n - 1]);
  double plateau = 0;
  for (std::size_t n = 12; n < curve.size(); ++n) plateau = std::max(plateau, std::abs(curve[n] - curve.back()));
  const double inf = find_record(trunc, 300, "DM-infinite").mean_nmse_db;
  o.check(worst_rise <= kPlateauSlack, fmt("centred origin: largest rise with order %.3f dB", worst_rise));
  o.check(plateau <= kPlateauSlack, fmt("centred origin: N0 = 12..15 within %.3f dB of N0 = 15 (%.2f dB; infinite %.2f dB)",
                                        plateau, curve.back(), inf));
  o.check(t < kDmTime, fmt("runtime %.1f s", t));
  return o;
}

// ---- 4 ----
Outcome oracle_equivalences() {
  Outcome o;
  std::mt19937_64 g(42);
  std::uniform_int_distribution<int> dim(2, 30);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const int M = dim(g), N = dim(g);
    const CMatrix B = random_cmatrix(g, M, N);
    const CVector s = random_cmatrix(g, M, 1);
    Regularization reg;
    reg.lambda = std::pow(10.0, -3.0 + (t % 4));
    if (t % 2) {
      const CMatrix L = random_cmatrix(g, M, M);
      reg.sigma = L * L.adjoint() + CMatrix::Identity(M, M);
    }
    const CVector a = solve_tikhonov_primal(B, s, reg), b = solve_tikhonov_dual(B, s, reg);
    worst = std::max(worst, (a - b).norm() / a.norm());
  }
  o.check(worst <= kTikhonovTol, fmt("Tikhonov primal vs dual, 100 instances: %.2e", worst));

  worst = 0;
  for (int t = 0; t < 5; ++t) {
    const auto arr = random_ball_array(20, 1.0, DirectivityKind::kOmni, 0.5, 500 + t);
    const double k = 1.0 + t;
    const CVector s = random_cmatrix(g, 20, 1);
    const auto w = solve_kernel(build_K(arr, k), s);
    CMatrix K(20, 20);
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double x = k * (arr.mics[i].position - arr.mics[j].position).norm();
        K(i, j) = x == 0 ? 1.0 : std::sin(x) / x;
      }
    const CVector ref = (K + 1e-3 * CMatrix::Identity(20, 20)).partialPivLu().solve(s);
    worst = std::max(worst, (w.alpha - ref).norm() / ref.norm());
  }
  o.check(worst <= kKrrTol, fmt("omni kernel estimator vs j0 ridge regression: %.2e", worst));

  worst = 0;
  for (int t = 0; t < 10; ++t) {
    const auto arr = random_ball_array(8, 1.0, t % 2 ? DirectivityKind::kFirstOrder : DirectivityKind::kOmni, 0.5, 600 + t);
    for (double k : {0.5, 1.0, 2.0}) worst = std::max(worst, finite_to_infinite_gap(arr, k, 20, Vec3::Zero()));
  }
  o.check(worst <= kKernelGapTol, fmt("finite (N0 = 20) vs infinite kernel, kR <= 2: %.2e", worst));
  return o;
}

// ---- 5 ----
Outcome special_functions() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (int nu = 0; nu <= 10; ++nu)
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
      const Complex w = sph_bessel_j(nu, x) * sph_hankel_h1_deriv(nu, x) - sph_bessel_j_deriv(nu, x) * sph_hankel_h1(nu, x);
      const Complex ref = kI / (x * x);
      worst = std::max(worst, std::abs(w - ref) / std::abs(ref));
    }
  o.check(worst <= kWronskianTol, fmt("Wronskian: %.2e", worst));

  const int N = 10;
  std::vector<double> ct, wt;
  gauss_legendre(2 * N + 2, ct, wt);
  const int nphi = 2 * N + 2;
  CMatrix gram = CMatrix::Zero(num_coeffs(N), num_coeffs(N));
  for (std::size_t i = 0; i < ct.size(); ++i)
    for (int p = 0; p < nphi; ++p) {
      const double st = std::sqrt(1 - ct[i] * ct[i]), phi = 2 * kPi * p / nphi;
      const auto y = sph_harm_all(N, Vec3(st * std::cos(phi), st * std::sin(phi), ct[i]));
      const Eigen::Map<const CVector> v(y.data(), y.size());
      gram += wt[i] * (2 * kPi / nphi) * v.conjugate() * v.transpose();
    }
  gram /= 4 * kPi;
  const double ortho = (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  o.check(ortho <= kOrthoTol, fmt("spherical harmonic orthonormality, N = 10: %.2e", ortho));

  std::mt19937_64 g(5);
  worst = 0;
  for (int t = 0; t < 10; ++t) {
    const Vec3 r1 = 0.3 * random_unit(g), r2 = 1.0 * random_unit(g);
    const CVector psi = singular_swf_all(30, r2, 1.0), phi = regular_swf_all(30, r1, 1.0);
    const Complex ref = green(r1, r2, 1.0);
    worst = std::max(worst, std::abs(psi.cwiseProduct(phi).sum() - ref) / std::abs(ref));
  }
  o.check(worst <= kAdditionTol, fmt("addition theorem, N = 30: %.2e", worst));

  worst = 0;
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int t = 0; t < 10; ++t) {
    const auto rot = Rotation3::from_euler_zyz(ang(g), std::abs(ang(g)), ang(g));
    for (int nu = 0; nu <= 10; ++nu) {
      const CMatrix d = wigner_d(nu, rot);
      worst = std::max(worst, (d * d.adjoint() - CMatrix::Identity(2 * nu + 1, 2 * nu + 1)).cwiseAbs().maxCoeff());
    }
  }
  o.check(worst <= kUnitarityTol, fmt("Wigner D unitarity, nu <= 10: %.2e", worst));

  bool decreasing = true;
  double final_err = 0;
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 10; ++t) {
    const Vec3 d1 = random_unit(g) * 0.5 * std::cbrt(u(g)), d2 = random_unit(g) * 0.5 * std::cbrt(u(g));
    const CMatrix ref = translation_matrix(d1 + d2, 2.0, 3, 3);
    double prev = 1e300;
    for (int L : {3, 6, 9, 12, 15}) {
      const double err = (translation_matrix(d2, 2.0, 3, L) * translation_matrix(d1, 2.0, L, 3) - ref).cwiseAbs().maxCoeff();
      if (prev > 1e-13 && !(err < prev)) decreasing = false;
      prev = err;
    }
    final_err = std::max(final_err, prev);
  }
  o.check(decreasing, fmt("translation composition error decreases with order (final %.2e)", final_err));
  const double t = seconds_since(t0);
  o.check(t < kSpecfunTime, fmt("runtime %.2f s", t));
  return o;
}

// ---- 6 ----
Outcome synthesis() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = synthesis_from_json(read(scenario("synth.json")));
  const auto mask = cfg.control_mask();
  const auto ncontrol = std::count(mask.begin(), mask.end(), true);
  o.check(cfg.sources.size() == 32 && ncontrol == 36 && mask.size() == 441,
          fmt("%.0f sources, %.0f control points, %.0f evaluation points", cfg.sources.size(), ncontrol, mask.size()));
  const auto recs = run_synthesis(cfg);
  g_first_run["synth.csv"] = synth_csv(recs);
  for (const auto& r : recs) {
    o.check(r.wpm_region_db < r.pm_region_db,
            fmt("%.0f Hz region: WPM %.2f dB, PM %.2f dB", r.frequency, r.wpm_region_db, r.pm_region_db));
    o.note(fmt("%.0f Hz control points: WPM %.2f dB, PM %.2f dB", r.frequency, r.wpm_control_db, r.pm_control_db));
  }
  const double t = seconds_since(t0);
  o.check(t < kSynthTime, fmt("runtime %.2f s", t));
  return o;
}

// ---- 7 ----
Outcome anc() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const json j = read(scenario("anc.json"));
  const auto cfg = anc_from_json(j);
  o.check(cfg.mics.size() == 24 && cfg.sources.size() == 12, fmt("%.0f error microphones, %.0f sources", cfg.mics.size(), cfg.sources.size()));
  const auto recs = run_anc(cfg);
  g_first_run["anc.csv"] = anc_csv(recs);
  for (std::size_t i = 0; i + 1 < recs.size(); i += 2) {
    const auto& mpc = recs[i];
    const auto& ki = recs[i + 1];
    o.check(ki.converged_db < mpc.converged_db,
            fmt("%.0f Hz regional power: kernel %.2f dB, multipoint %.2f dB", ki.frequency, ki.converged_db, mpc.converged_db));
    o.note(fmt("after iterations: kernel %.2f dB, multipoint %.2f dB", ki.iterated_db, mpc.iterated_db));
    o.check(ki.cost_monotone, "kernel-weighted cost non-increasing per iteration");
    o.check(std::max(ki.gradient_rel_err, mpc.gradient_rel_err) <= kGradientTol,
            fmt("gradient vs finite differences: %.2e", std::max(ki.gradient_rel_err, mpc.gradient_rel_err)));
  }
  // Spherical j0 kernel on the same geometry, reported only.
  auto alt = cfg;
  alt.kernel = InterpolationKernel::kSpherical;
  for (const auto& r : run_anc(alt))
    if (r.method == "KI") o.note(fmt("spherical-kernel weighting at %.0f Hz: %.2f dB", r.frequency, r.converged_db));
  const double t = seconds_since(t0);
  o.check(t < kAncTime, fmt("runtime %.2f s", t));
  return o;
}

// ---- 8 ----
Outcome determinism(const fs::path& dir) {
  Outcome o;
  std::map<std::string, std::string> second;
  second["forbidden.csv"] = forbidden_csv(forbidden_frequencies(1.0, 340.65, 7, 1000.0));
  for (const char* s : {"bm_sphere", "dm_spherical_first", "dm_irregular_omni", "dm_truncation"})
    second[std::string(s) + ".csv"] = sweep_csv(run_sweep(load_scenario(scenario((std::string(s) + ".json").c_str()))));
  second["synth.csv"] = synth_csv(run_synthesis(synthesis_from_json(read(scenario("synth.json")))));
  second["anc.csv"] = anc_csv(run_anc(anc_from_json(read(scenario("anc.json")))));
  fs::create_directories(dir / "run1");
  fs::create_directories(dir / "run2");
  for (const auto& [name, text] : g_first_run) {
    std::ofstream(dir / "run1" / name, std::ios::binary) << text;
    std::ofstream(dir / "run2" / name, std::ios::binary) << second[name];
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const bool same = slurp(dir / "run1" / name) == slurp(dir / "run2" / name) && !text.empty();
    o.check(same, name + (same ? " identical" : " differs"));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  struct Item {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items = {
      {"1 forbidden frequencies", forbidden},
      {"2 boundary-measurement reproduction", boundary_reproduction},
      {"3 discrete-measurement reproduction", discrete_reproduction},
      {"4 oracle equivalences", oracle_equivalences},
      {"5 special functions", special_functions},
      {"6 weighted pressure matching", synthesis},
      {"7 spatial active noise control", anc},
      {"8 determinism", [&] { return determinism(out); }},
  };
  int failed = 0;
  for (const auto& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", it.name, seconds_since(t0));
    for (const auto& l : o.lines) std::printf("    %s\n", l.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
  return failed ? 1 : 0;
}
