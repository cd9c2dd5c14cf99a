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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfe/applications.hpp"
#include "sfe/boundary.hpp"
#include "sfe/discrete.hpp"
#include "sfe/observation.hpp"

namespace sfe {

using nlohmann::json;

// 10 log10(sum |est - truth|^2 / sum |truth|^2), floored.
inline double nmse_db(const CVector& est, const CVector& truth, double floor_db = -300.0) {
  if (est.size() != truth.size()) throw std::invalid_argument("estimate and truth sizes differ");
  const double den = truth.squaredNorm();
  if (!(den > 0)) throw std::invalid_argument("true field is identically zero on the grid");
  const double num = (est - truth).squaredNorm();
  if (num == 0.0) return floor_db;
  return std::max(floor_db, 10 * std::log10(num / den));
}

// Formats with 17 significant digits.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Cubic lattice points inside a ball.
struct BallGrid {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  double spacing = 0.1;

  std::vector<Vec3> points() const {
    std::vector<Vec3> out;
    const int n = static_cast<int>(std::floor(radius / spacing + 1e-9));
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j)
        for (int l = -n; l <= n; ++l) {
          const Vec3 d(i * spacing, j * spacing, l * spacing);
          if (d.norm() <= radius + 1e-9) out.push_back(center + d);
        }
    return out;
  }
};

// Square grid in a coordinate plane, centred on the origin of that plane.
struct PlaneSpec {
  std::string axes = "xy";
  double extent = 2.0;
  double spacing = 0.05;
  double offset = 0.0;  // along the remaining axis

  int count() const { return static_cast<int>(std::ceil(extent / spacing - 1e-9)) + 1; }
  std::vector<Vec3> points() const {
    int a, b, c;
    if (axes == "xy") a = 0, b = 1, c = 2;
    else if (axes == "xz") a = 0, b = 2, c = 1;
    else if (axes == "yz") a = 1, b = 2, c = 0;
    else throw std::invalid_argument("plane must be xy, xz or yz");
    std::vector<Vec3> out;
    const int n = count();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec3 p;
        p(a) = -extent / 2 + i * spacing;
        p(b) = -extent / 2 + j * spacing;
        p(c) = offset;
        out.push_back(p);
      }
    return out;
  }
};

// ---- configuration ----

namespace detail {

inline std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

inline const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double number(const json& j, const char* key, const std::string& path, double def) {
  const json* v = find(j, key);
  if (!v) return def;
  if (!v->is_number()) throw ConfigError(join(path, key), "expected a number");
  return v->get<double>();
}

inline double positive(const json& j, const char* key, const std::string& path, double def) {
  const double v = number(j, key, path, def);
  if (!(v > 0)) throw ConfigError(join(path, key), "must be positive");
  return v;
}

inline int integer(const json& j, const char* key, const std::string& path, int def, int lo) {
  const json* v = find(j, key);
  if (!v) return def;
  if (!v->is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  const int x = v->get<int>();
  if (x < lo) throw ConfigError(join(path, key), "must be at least " + std::to_string(lo));
  return x;
}

inline std::string string(const json& j, const char* key, const std::string& path, const std::string& def) {
  const json* v = find(j, key);
  if (!v) return def;
  if (!v->is_string()) throw ConfigError(join(path, key), "expected a string");
  return v->get<std::string>();
}

inline Vec3 vec3(const json& j, const char* key, const std::string& path, const Vec3& def) {
  const json* v = find(j, key);
  return v ? json_vec3(*v, join(path, key)) : def;
}

inline Vec3 unit(const json& j, const char* key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) throw ConfigError(join(path, key), "required");
  const Vec3 x = json_vec3(*v, join(path, key));
  if (std::abs(x.norm() - 1.0) > 1e-9) throw ConfigError(join(path, key), "must be a unit vector");
  return x;
}

inline std::vector<double> frequencies(const json& j, const std::string& path) {
  std::vector<double> f;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
      f.push_back(j[i].get<double>());
    }
  } else if (j.is_object()) {
    const double start = positive(j, "start", path, 0.0);
    const double stop = positive(j, "stop", path, 0.0);
    const double step = positive(j, "step", path, 0.0);
    for (int i = 0; start + i * step <= stop * (1 + 1e-12); ++i) f.push_back(start + i * step);
  } else {
    throw ConfigError(path, "expected a list or {start, stop, step}");
  }
  if (f.empty()) throw ConfigError(path, "no frequencies");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!(f[i] > 0)) throw ConfigError(path + "[" + std::to_string(i) + "]", "must be positive");
  return f;
}

inline json read_json_file(const std::filesystem::path& p, const std::string& path) {
  std::ifstream in(p);
  if (!in) throw ConfigError(path, "cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace detail

// Inline array, file reference, or generated layout.
struct ArraySpec {
  enum class Kind { kExplicit, kSpherical, kRandomBall };
  Kind kind = Kind::kSpherical;
  ArrayConfig fixed;
  int t = 7;
  int count = 64;
  double radius = 1.0;
  DirectivityKind mic_kind = DirectivityKind::kOmni;
  double a = 0.5;
  Mount mount = Mount::kOpen;
  std::uint64_t seed = 1000;
  bool redraw_per_trial = false;

  bool varies_by_trial() const { return kind == Kind::kRandomBall && redraw_per_trial; }
  ArrayConfig build(int trial) const {
    switch (kind) {
      case Kind::kExplicit: return fixed;
      case Kind::kSpherical: return spherical_array(t, radius, mic_kind, a, mount);
      default: return random_ball_array(count, radius, mic_kind, a, seed + (redraw_per_trial ? trial : 0));
    }
  }
};

inline ArraySpec array_spec_from_json(const json& j, const std::string& path,
                                      const std::filesystem::path& base = {}) {
  ArraySpec s;
  if (j.is_string()) {
    s.kind = ArraySpec::Kind::kExplicit;
    s.fixed = array_from_json(detail::read_json_file(base / j.get<std::string>(), path), path);
    return s;
  }
  if (!j.is_object()) throw ConfigError(path, "expected an object or a file name");
  if (!j.contains("preset")) {
    s.kind = ArraySpec::Kind::kExplicit;
    s.fixed = array_from_json(j, path);
    return s;
  }
  const std::string preset = detail::string(j, "preset", path, "");
  s.radius = detail::positive(j, "radius", path, 1.0);
  s.mic_kind = parse_directivity_kind(detail::string(j, "kind", path, "omni"), path + ".kind");
  s.a = detail::number(j, "a", path, 0.5);
  if (s.mic_kind == DirectivityKind::kFirstOrder && !(s.a >= 0 && s.a <= 1))
    throw ConfigError(path + ".a", "must lie in [0,1]");
  if (preset == "spherical") {
    s.kind = ArraySpec::Kind::kSpherical;
    s.t = detail::integer(j, "t", path, 7, 1);
    const auto avail = available_designs();
    if (std::find(avail.begin(), avail.end(), s.t) == avail.end())
      throw ConfigError(path + ".t", "no stored design of this strength");
    const std::string mount = detail::string(j, "mount", path, "open");
    if (mount == "rigid_sphere") s.mount = Mount::kRigidSphere;
    else if (mount != "open") throw ConfigError(path + ".mount", "unknown mount '" + mount + "'");
    if (s.mount == Mount::kRigidSphere && s.mic_kind != DirectivityKind::kOmni)
      throw ConfigError(path + ".kind", "rigid mount needs omnidirectional microphones");
  } else if (preset == "random_ball") {
    s.kind = ArraySpec::Kind::kRandomBall;
    s.count = detail::integer(j, "count", path, 64, 1);
    s.seed = static_cast<std::uint64_t>(detail::integer(j, "seed", path, 1000, 0));
    if (const json* r = detail::find(j, "redraw_per_trial")) {
      if (!r->is_boolean()) throw ConfigError(path + ".redraw_per_trial", "expected a boolean");
      s.redraw_per_trial = r->get<bool>();
    }
  } else {
    throw ConfigError(path + ".preset", "unknown preset '" + preset + "'");
  }
  return s;
}

enum class EstimatorType { kBmOmni, kBmFirst, kBmRigid, kDmFinite, kDmInfinite };

inline std::string to_string(EstimatorType t) {
  switch (t) {
    case EstimatorType::kBmOmni: return "BM-omni";
    case EstimatorType::kBmFirst: return "BM-first";
    case EstimatorType::kBmRigid: return "BM-rigid";
    case EstimatorType::kDmFinite: return "DM-finite";
    default: return "DM-infinite";
  }
}

struct EstimatorSpec {
  EstimatorType type = EstimatorType::kDmInfinite;
  std::string label;  // defaults to the type name
  int N = 7;          // boundary truncation, or spherical-basis order
  Vec3 origin = Vec3::Zero();
  bool plane_basis = false;
  int plane_t = 7;
  double lambda = 1e-3;
  std::optional<ArraySpec> array;

  std::string id() const { return label.empty() ? to_string(type) : label; }
};

// A fitted estimate: field evaluator plus named diagnostics.
struct EstimateResult {
  std::function<Complex(const Vec3&)> eval;
  std::map<std::string, double> diagnostics;
};

// Array- and frequency-specific state; fit() runs per observation.
using PreparedEstimator = std::function<EstimateResult(const CVector& s)>;

namespace detail {

inline void check_boundary_array(const ArrayConfig& arr, EstimatorType type) {
  const double R = arr.mics.front().position.norm();
  for (const auto& m : arr.mics) {
    if (std::abs(m.position.norm() - R) > 1e-9 * R)
      throw std::invalid_argument("boundary estimators need microphones on one sphere about the origin");
    const bool omni = m.directivity.max_order == 0;
    if (type == EstimatorType::kBmFirst) {
      if (m.kind != DirectivityKind::kFirstOrder || (m.orientation - m.position / R).norm() > 1e-9 ||
          !(m.a > 0 && m.a < 1) || m.a != arr.mics.front().a)
        throw std::invalid_argument("BM-first needs outward first-order microphones with one a in (0,1)");
    } else if (!omni) {
      throw std::invalid_argument(to_string(type) + " needs omnidirectional microphones");
    }
  }
  if ((type == EstimatorType::kBmRigid) != (arr.mount == Mount::kRigidSphere))
    throw std::invalid_argument("BM-rigid requires, and only it accepts, a rigid-sphere mount");
}

}  // namespace detail

inline PreparedEstimator prepare_estimator(const EstimatorSpec& spec, const ArrayConfig& arr, double k) {
  switch (spec.type) {
    case EstimatorType::kBmOmni:
    case EstimatorType::kBmFirst:
    case EstimatorType::kBmRigid: {
      detail::check_boundary_array(arr, spec.type);
      const double R = arr.mics.front().position.norm();
      std::vector<Vec3> x;
      for (const auto& m : arr.mics) x.push_back(m.position / R);
      const std::vector<double> w(x.size(), 1.0 / x.size());
      const ArrayType at = spec.type == EstimatorType::kBmOmni    ? ArrayType::kOmni
                           : spec.type == EstimatorType::kBmFirst ? ArrayType::kFirst
                                                                  : ArrayType::kRigid;
      BoundaryOptions opt;
      opt.a = arr.mics.front().a;
      const int N = spec.N;
      return [=](const CVector& s) {
        const auto est = estimate_coefficients(s, x, w, at, R, k, N, opt);
        EstimateResult r;
        r.eval = [est, k](const Vec3& p) { return reconstruct(est, p, k); };
        r.diagnostics["min_abs_response"] = est.min_abs_response;
        return r;
      };
    }
    case EstimatorType::kDmFinite: {
      const BasisSpec basis = spec.plane_basis ? BasisSpec::plane(spec.origin, t_design(spec.plane_t))
                                               : BasisSpec::spherical(spec.origin, spec.N);
      const CMatrix B = build_B(arr, basis, k);
      Regularization reg;
      reg.lambda = spec.lambda;
      return [=](const CVector& s) {
        const CVector c = solve_tikhonov(B, s, reg);
        EstimateResult r;
        r.eval = [c, basis, k](const Vec3& p) { return eval_finite(c, basis, p, k); };
        return r;
      };
    }
    default: {
      const CMatrix K = build_K(arr, k);
      Regularization reg;
      reg.lambda = spec.lambda;
      return [=](const CVector& s) {
        const auto w = solve_kernel(K, s, reg);
        EstimateResult r;
        r.eval = [w, arr, k](const Vec3& p) { return eval_kernel(w.alpha, arr, p, k); };
        r.diagnostics["rcond"] = w.rcond;
        return r;
      };
    }
  }
}

inline EstimatorSpec estimator_from_json(const json& j, const std::string& path, double lambda,
                                         const std::filesystem::path& base = {}) {
  EstimatorSpec s;
  s.lambda = lambda;
  const std::string type = j.is_string() ? j.get<std::string>() : detail::string(j, "type", path, "");
  if (type == "BM-omni") s.type = EstimatorType::kBmOmni;
  else if (type == "BM-first") s.type = EstimatorType::kBmFirst;
  else if (type == "BM-rigid") s.type = EstimatorType::kBmRigid;
  else if (type == "DM-finite") s.type = EstimatorType::kDmFinite;
  else if (type == "DM-infinite") s.type = EstimatorType::kDmInfinite;
  else throw ConfigError(path + (j.is_string() ? "" : ".type"), "unknown estimator '" + type + "'");
  if (j.is_string()) return s;
  if (!j.is_object()) throw ConfigError(path, "expected a string or an object");
  s.label = detail::string(j, "label", path, "");
  s.N = detail::integer(j, "N", path, 7, 0);
  s.lambda = detail::positive(j, "lambda", path, lambda);
  s.origin = detail::vec3(j, "origin", path, Vec3::Zero());
  const std::string basis = detail::string(j, "basis", path, "spherical");
  if (basis == "plane") s.plane_basis = true;
  else if (basis != "spherical") throw ConfigError(path + ".basis", "expected spherical or plane");
  s.plane_t = detail::integer(j, "plane_t", path, 7, 1);
  if (const json* a = detail::find(j, "array")) s.array = array_spec_from_json(*a, path + ".array", base);
  return s;
}

struct FieldSpec {
  bool point_source = false;
  Vec3 direction = Vec3::UnitX();  // plane wave e^{-ik x.r}
  Vec3 position = Vec3::Zero();    // point source

  Field field() const {
    if (point_source) return PointSourceField{position};
    return PlaneWaveField{direction};
  }
};

struct ScenarioConfig {
  double c = 340.65;
  ArraySpec array;
  std::vector<EstimatorSpec> estimators;
  FieldSpec field;
  std::vector<double> frequencies;
  double snr_db = 30.0;
  bool noise = true;
  std::uint64_t seed = 0;
  int trials = 10;
  double lambda = 1e-3;
  BallGrid grid;
  PlaneSpec plane;

  const ArraySpec& array_for(const EstimatorSpec& e) const { return e.array ? *e.array : array; }
};

inline ScenarioConfig scenario_from_json(const json& j, const std::filesystem::path& base = {}) {
  if (!j.is_object()) throw ConfigError("", "expected a JSON object");
  ScenarioConfig s;
  s.c = detail::positive(j, "c", "", 340.65);
  s.lambda = detail::positive(j, "lambda", "", 1e-3);
  s.snr_db = detail::number(j, "snr_db", "", 30.0);
  if (const json* n = detail::find(j, "noise")) {
    if (!n->is_boolean()) throw ConfigError("noise", "expected a boolean");
    s.noise = n->get<bool>();
  }
  s.seed = static_cast<std::uint64_t>(detail::integer(j, "seed", "", 0, 0));
  s.trials = detail::integer(j, "trials", "", 10, 1);

  if (const json* a = detail::find(j, "array")) s.array = array_spec_from_json(*a, "array", base);
  else if (const json* f = detail::find(j, "array_file")) s.array = array_spec_from_json(*f, "array_file", base);

  const json* est = detail::find(j, "estimators");
  if (!est || !est->is_array() || est->empty()) throw ConfigError("estimators", "expected a nonempty list");
  for (std::size_t i = 0; i < est->size(); ++i)
    s.estimators.push_back(estimator_from_json((*est)[i], "estimators[" + std::to_string(i) + "]", s.lambda, base));

  const json* f = detail::find(j, "field");
  if (!f || !f->is_object()) throw ConfigError("field", "expected an object");
  const std::string ft = detail::string(*f, "type", "field", "plane_wave");
  if (ft == "plane_wave") {
    s.field.direction = detail::unit(*f, "direction", "field");
  } else if (ft == "point_source") {
    s.field.point_source = true;
    s.field.position = detail::vec3(*f, "position", "field", Vec3(2, 0, 0));
  } else {
    throw ConfigError("field.type", "unknown field '" + ft + "'");
  }

  const json* fr = detail::find(j, "frequencies");
  if (!fr) throw ConfigError("frequencies", "required");
  s.frequencies = detail::frequencies(*fr, "frequencies");

  if (const json* g = detail::find(j, "grid")) {
    if (!g->is_object()) throw ConfigError("grid", "expected an object");
    s.grid.spacing = detail::positive(*g, "spacing", "grid", 0.1);
    s.grid.radius = detail::positive(*g, "radius", "grid", 1.0);
    s.grid.center = detail::vec3(*g, "center", "grid", Vec3::Zero());
  }
  if (s.field.point_source && (s.field.position - s.grid.center).norm() <= s.grid.radius)
    throw ConfigError("field.position", "point source lies inside the evaluation region");
  if (const json* p = detail::find(j, "plane")) {
    if (!p->is_object()) throw ConfigError("plane", "expected an object");
    s.plane.extent = detail::positive(*p, "extent", "plane", 2.0);
    s.plane.spacing = detail::positive(*p, "spacing", "plane", 0.05);
    s.plane.offset = detail::number(*p, "offset", "plane", 0.0);
  }

  // Estimator and array compatibility.
  for (std::size_t i = 0; i < s.estimators.size(); ++i) {
    const auto& e = s.estimators[i];
    const std::string ep = "estimators[" + std::to_string(i) + "]";
    const ArrayConfig arr = s.array_for(e).build(0);
    if (e.type == EstimatorType::kBmOmni || e.type == EstimatorType::kBmFirst || e.type == EstimatorType::kBmRigid) {
      try {
        detail::check_boundary_array(arr, e.type);
      } catch (const std::invalid_argument& err) {
        throw ConfigError(e.array ? ep + ".array" : "array", err.what());
      }
      if (s.array_for(e).varies_by_trial()) throw ConfigError(ep, "boundary estimators need a fixed array");
    }
  }
  return s;
}

inline ScenarioConfig load_scenario(const std::filesystem::path& p) {
  return scenario_from_json(detail::read_json_file(p, ""), p.parent_path());
}

// ---- sweeps ----

struct ResultRecord {
  double frequency = 0.0;
  std::string estimator;
  std::vector<std::uint64_t> seeds;
  std::vector<double> nmse_db;
  double mean_nmse_db = 0.0;
  std::map<std::string, double> diagnostics;  // worst case over trials
  double wall_seconds = 0.0;                  // not written to files
};

inline CVector evaluate_on(const std::function<Complex(const Vec3&)>& f, const std::vector<Vec3>& pts) {
  CVector out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out(i) = f(pts[i]);
  return out;
}

// One trial of one estimator: simulate, fit.
inline EstimateResult run_trial(const ScenarioConfig& cfg, const EstimatorSpec& est, double f, int trial,
                                const PreparedEstimator* prepared = nullptr) {
  const double k = 2 * kPi * f / cfg.c;
  const ArrayConfig arr = cfg.array_for(est).build(trial);
  const NoiseModel nm{cfg.snr_db, cfg.seed + static_cast<std::uint64_t>(trial), cfg.noise};
  const auto obs = simulate_observation(arr, cfg.field.field(), k, nm);
  if (prepared) return (*prepared)(obs.s);
  return prepare_estimator(est, arr, k)(obs.s);
}

inline std::vector<ResultRecord> run_sweep(const ScenarioConfig& cfg) {
  const auto grid = cfg.grid.points();
  if (grid.empty()) throw ConfigError("grid", "evaluation grid is empty");
  std::vector<ResultRecord> out;
  for (double f : cfg.frequencies) {
    const double k = 2 * kPi * f / cfg.c;
    const Field field = cfg.field.field();
    const CVector truth = evaluate_on([&](const Vec3& r) { return field_value(field, r, k); }, grid);
    for (const auto& est : cfg.estimators) {
      const auto t0 = std::chrono::steady_clock::now();
      ResultRecord rec;
      rec.frequency = f;
      rec.estimator = est.id();
      std::optional<PreparedEstimator> fixed;
      if (!cfg.array_for(est).varies_by_trial()) fixed = prepare_estimator(est, cfg.array_for(est).build(0), k);
      for (int t = 0; t < cfg.trials; ++t) {
        const auto res = run_trial(cfg, est, f, t, fixed ? &*fixed : nullptr);
        rec.seeds.push_back(cfg.seed + t);
        rec.nmse_db.push_back(nmse_db(evaluate_on(res.eval, grid), truth));
        for (const auto& [name, v] : res.diagnostics) {
          auto it = rec.diagnostics.find(name);
          if (it == rec.diagnostics.end()) rec.diagnostics[name] = v;
          else it->second = std::min(it->second, v);
        }
      }
      double sum = 0;
      for (double v : rec.nmse_db) sum += v;
      rec.mean_nmse_db = sum / rec.nmse_db.size();
      rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.push_back(std::move(rec));
    }
  }
  return out;
}

inline const ResultRecord& find_record(const std::vector<ResultRecord>& recs, double f, const std::string& id) {
  for (const auto& r : recs)
    if (r.frequency == f && r.estimator == id) return r;
  throw std::out_of_range("no record for " + id + " at " + fmt17(f) + " Hz");
}

inline void write_results_csv(std::ostream& os, const std::vector<ResultRecord>& recs) {
  os << "frequency,estimator,trial,seed,nmse_db,min_abs_response,rcond\n";
  auto diag = [](const ResultRecord& r, const char* name) {
    const auto it = r.diagnostics.find(name);
    return it == r.diagnostics.end() ? std::string() : fmt17(it->second);
  };
  for (const auto& r : recs) {
    for (std::size_t t = 0; t < r.nmse_db.size(); ++t)
      os << fmt17(r.frequency) << ',' << r.estimator << ',' << t << ',' << r.seeds[t] << ','
         << fmt17(r.nmse_db[t]) << ",,\n";
    os << fmt17(r.frequency) << ',' << r.estimator << ",mean,," << fmt17(r.mean_nmse_db) << ','
       << diag(r, "min_abs_response") << ',' << diag(r, "rcond") << '\n';
  }
}

inline json results_to_json(const std::vector<ResultRecord>& recs) {
  json out = json::array();
  for (const auto& r : recs) {
    json e;
    e["frequency"] = r.frequency;
    e["estimator"] = r.estimator;
    e["seeds"] = r.seeds;
    e["nmse_db"] = r.nmse_db;
    e["mean_nmse_db"] = r.mean_nmse_db;
    e["diagnostics"] = r.diagnostics;
    out.push_back(e);
  }
  return out;
}

// ---- field dumps ----

struct FieldSample {
  Vec3 position;
  Complex truth;
  std::optional<Complex> estimate;
};

inline std::vector<FieldSample> sample_plane(const ScenarioConfig& cfg, double f, const PlaneSpec& plane,
                                             const std::function<Complex(const Vec3&)>* estimate) {
  const double k = 2 * kPi * f / cfg.c;
  const Field field = cfg.field.field();
  std::vector<FieldSample> out;
  for (const auto& p : plane.points()) {
    FieldSample s{p, 0.0, std::nullopt};
    if (!cfg.field.point_source || (p - cfg.field.position).norm() > 1e-9) s.truth = field_value(field, p, k);
    if (estimate) s.estimate = (*estimate)(p);
    out.push_back(s);
  }
  return out;
}

// norm_err = |est - truth|^2 / mean |truth|^2 over the dumped points.
inline void write_field_csv(std::ostream& os, const std::vector<FieldSample>& samples) {
  double mean = 0.0;
  for (const auto& s : samples) mean += std::norm(s.truth);
  mean /= samples.size();
  os << "x,y,z,re_true,im_true,re_est,im_est,norm_err\n";
  for (const auto& s : samples) {
    os << fmt17(s.position.x()) << ',' << fmt17(s.position.y()) << ',' << fmt17(s.position.z()) << ','
       << fmt17(s.truth.real()) << ',' << fmt17(s.truth.imag()) << ',';
    if (s.estimate)
      os << fmt17(s.estimate->real()) << ',' << fmt17(s.estimate->imag()) << ','
         << fmt17(std::norm(*s.estimate - s.truth) / mean);
    else
      os << ",,";
    os << '\n';
  }
}

// ---- sound field synthesis ----

struct SynthesisConfig {
  double c = 340.65;
  std::vector<Vec3> sources;
  int grid_count = 21;      // evaluation points per axis
  double grid_half = 0.5;   // evaluation square half width, z = 0
  int control_stride = 4;   // every stride-th grid index per axis is a control point
  Vec3 direction = Vec3(-std::sqrt(0.5), std::sqrt(0.5), 0);  // plane wave e^{-ik x.r}
  std::vector<double> frequencies;
  double eta_rel = 1e-3;    // eta relative to the spectral norm of each method's Gram matrix
  double lambda = 1e-3;
  double quad_spacing = 0.02;
  InterpolationKernel kernel = InterpolationKernel::kSpherical;

  std::vector<Vec3> eval_points() const {
    std::vector<Vec3> out;
    const double h = 2 * grid_half / (grid_count - 1);
    for (int i = 0; i < grid_count; ++i)
      for (int j = 0; j < grid_count; ++j) out.emplace_back(-grid_half + i * h, -grid_half + j * h, 0.0);
    return out;
  }
  std::vector<bool> control_mask() const {
    std::vector<bool> m;
    for (int i = 0; i < grid_count; ++i)
      for (int j = 0; j < grid_count; ++j) m.push_back(i % control_stride == 0 && j % control_stride == 0);
    return m;
  }
};

namespace detail {

inline InterpolationKernel kernel_kind(const json& j, const std::string& path, InterpolationKernel def) {
  const std::string s = string(j, "kernel", path, def == InterpolationKernel::kSpherical ? "spherical" : "planar");
  if (s == "spherical") return InterpolationKernel::kSpherical;
  if (s == "planar") return InterpolationKernel::kPlanar;
  throw ConfigError(join(path, "kernel"), "expected spherical or planar");
}

inline std::vector<Vec3> points_from_json(const json& j, const std::string& path) {
  if (j.is_array()) {
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(json_vec3(j[i], path + "[" + std::to_string(i) + "]"));
    if (out.empty()) throw ConfigError(path, "no points");
    return out;
  }
  if (!j.is_object()) throw ConfigError(path, "expected a list of points or a square preset");
  // {"square": {"count", "half", "z"(number or list), "shift"}}
  const int n = integer(j, "count", path, 0, 1);
  const double half = positive(j, "half", path, 1.0);
  const double shift = number(j, "shift", path, 0.0);
  std::vector<double> zs{0.0};
  if (const json* z = find(j, "z")) {
    zs.clear();
    if (z->is_number()) zs.push_back(z->get<double>());
    else if (z->is_array())
      for (const auto& v : *z) {
        if (!v.is_number()) throw ConfigError(path + ".z", "expected numbers");
        zs.push_back(v.get<double>());
      }
    else throw ConfigError(path + ".z", "expected a number or a list");
  }
  std::vector<Vec3> out;
  for (double z : zs) {
    auto sq = square_perimeter(n, half, z);
    if (shift != 0.0) sq = shift_alternate_outward(sq, half, shift);
    out.insert(out.end(), sq.begin(), sq.end());
  }
  return out;
}

}  // namespace detail

inline SynthesisConfig synthesis_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "expected a JSON object");
  SynthesisConfig s;
  s.c = detail::positive(j, "c", "", 340.65);
  const json* src = detail::find(j, "sources");
  if (!src) throw ConfigError("sources", "required");
  s.sources = detail::points_from_json(*src, "sources");
  s.grid_count = detail::integer(j, "grid_count", "", 21, 2);
  s.grid_half = detail::positive(j, "grid_half", "", 0.5);
  s.control_stride = detail::integer(j, "control_stride", "", 4, 1);
  if (detail::find(j, "direction")) s.direction = detail::unit(j, "direction", "");
  const json* fr = detail::find(j, "frequencies");
  if (!fr) throw ConfigError("frequencies", "required");
  s.frequencies = detail::frequencies(*fr, "frequencies");
  s.eta_rel = detail::positive(j, "eta_rel", "", 1e-3);
  s.lambda = detail::positive(j, "lambda", "", 1e-3);
  s.quad_spacing = detail::positive(j, "quad_spacing", "", 0.02);
  s.kernel = detail::kernel_kind(j, "", InterpolationKernel::kSpherical);
  return s;
}

struct SynthesisRecord {
  double frequency = 0.0;
  // Mean |u - u_des|^2 / mean |u_des|^2 in dB, away from and at the control points.
  double pm_region_db = 0.0, wpm_region_db = 0.0;
  double pm_control_db = 0.0, wpm_control_db = 0.0;
};

inline std::vector<SynthesisRecord> run_synthesis(const SynthesisConfig& cfg) {
  const auto eval = cfg.eval_points();
  const auto mask = cfg.control_mask();
  std::vector<Vec3> control;
  for (std::size_t i = 0; i < eval.size(); ++i)
    if (mask[i]) control.push_back(eval[i]);
  const Vec3 lo(-cfg.grid_half, -cfg.grid_half, 0), hi(cfg.grid_half, cfg.grid_half, 0);
  const auto region = ControlRegion::box(lo, hi, control, cfg.quad_spacing);
  std::vector<SynthesisRecord> out;
  for (double f : cfg.frequencies) {
    const double k = 2 * kPi * f / cfg.c;
    const CMatrix Gc = transfer_matrix(control, cfg.sources, k);
    const CMatrix Ge = transfer_matrix(eval, cfg.sources, k);
    CVector ud(control.size()), ue(eval.size());
    for (std::size_t i = 0; i < control.size(); ++i) ud(i) = plane_wave(control[i], cfg.direction, k);
    for (std::size_t i = 0; i < eval.size(); ++i) ue(i) = plane_wave(eval[i], cfg.direction, k);
    const CMatrix W = region_weighting(region, k, cfg.lambda, cfg.kernel);
    const CMatrix Spm = Gc.adjoint() * Gc;
    const CMatrix Swpm = Gc.adjoint() * W * Gc;
    auto spectral = [](const CMatrix& S) { return Eigen::SelfAdjointEigenSolver<CMatrix>(S).eigenvalues().maxCoeff(); };
    const CVector dpm = pm_drive(Gc, ud, cfg.eta_rel * spectral(Spm));
    const CVector dwpm = wpm_drive(Gc, ud, W, cfg.eta_rel * spectral(Swpm));
    auto err = [&](const CVector& d, bool at_control) {
      const CVector e = Ge * d - ue;
      double num = 0, den = 0;
      for (std::size_t i = 0; i < eval.size(); ++i)
        if (mask[i] == at_control) {
          num += std::norm(e(i));
          den += std::norm(ue(i));
        }
      return 10 * std::log10(num / den);
    };
    out.push_back({f, err(dpm, false), err(dwpm, false), err(dpm, true), err(dwpm, true)});
  }
  return out;
}

inline void write_synthesis_csv(std::ostream& os, const std::vector<SynthesisRecord>& recs) {
  os << "frequency,pm_region_db,wpm_region_db,pm_control_db,wpm_control_db\n";
  for (const auto& r : recs)
    os << fmt17(r.frequency) << ',' << fmt17(r.pm_region_db) << ',' << fmt17(r.wpm_region_db) << ','
       << fmt17(r.pm_control_db) << ',' << fmt17(r.wpm_control_db) << '\n';
}

// ---- active noise control ----

struct AncConfig {
  double c = 340.65;
  std::vector<Vec3> mics;
  std::vector<Vec3> sources;
  Vec3 primary = Vec3(0, 3, 0);
  std::vector<double> frequencies;
  double region_half = 0.5;  // square target region at z = 0
  double quad_spacing = 0.02;
  double lambda = 1e-3;
  InterpolationKernel kernel = InterpolationKernel::kPlanar;
  double mu_rel = 0.5;  // step as a fraction of 2 / max eigenvalue
  int iterations = 200;
};

inline AncConfig anc_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "expected a JSON object");
  AncConfig s;
  s.c = detail::positive(j, "c", "", 340.65);
  const json* m = detail::find(j, "mics");
  if (!m) throw ConfigError("mics", "required");
  s.mics = detail::points_from_json(*m, "mics");
  const json* src = detail::find(j, "sources");
  if (!src) throw ConfigError("sources", "required");
  s.sources = detail::points_from_json(*src, "sources");
  s.primary = detail::vec3(j, "primary", "", Vec3(0, 3, 0));
  const json* fr = detail::find(j, "frequencies");
  if (!fr) throw ConfigError("frequencies", "required");
  s.frequencies = detail::frequencies(*fr, "frequencies");
  s.region_half = detail::positive(j, "region_half", "", 0.5);
  s.quad_spacing = detail::positive(j, "quad_spacing", "", 0.02);
  s.lambda = detail::positive(j, "lambda", "", 1e-3);
  s.kernel = detail::kernel_kind(j, "", InterpolationKernel::kPlanar);
  s.mu_rel = detail::positive(j, "mu_rel", "", 0.5);
  if (s.mu_rel >= 1) throw ConfigError("mu_rel", "must be below 1");
  s.iterations = detail::integer(j, "iterations", "", 200, 0);
  const double h = s.region_half;
  if (std::abs(s.primary.x()) <= h && std::abs(s.primary.y()) <= h)
    throw ConfigError("primary", "primary source lies inside the target region");
  return s;
}

struct AncRecord {
  double frequency = 0.0;
  std::string method;         // MPC or KI
  double converged_db = 0.0;  // regional power of the stationary point over primary power
  double iterated_db = 0.0;   // same after `iterations` LMS steps
  bool cost_monotone = true;
  double gradient_rel_err = 0.0;
};

inline double regional_power_db(const AncConfig& cfg, const std::vector<Vec3>& pts, double k, const CVector& w) {
  const CVector up = transfer_matrix(pts, {cfg.primary}, k).col(0);
  const CVector u = up + transfer_matrix(pts, cfg.sources, k) * w;
  return 10 * std::log10(u.squaredNorm() / up.squaredNorm());
}

// Largest relative deviation between the analytic gradient and central differences.
inline double anc_gradient_check(const AncProblem& p, const CVector& w, double h = 1e-6) {
  const CVector g = p.gradient(w);
  double worst = 0.0;
  for (int l = 0; l < w.size(); ++l) {
    CVector e = CVector::Zero(w.size());
    e(l) = h;
    const double dre = (p.cost(w + e) - p.cost(w - e)) / (2 * h);
    const double dim = (p.cost(w + kI * e) - p.cost(w - kI * e)) / (2 * h);
    worst = std::max(worst, std::abs(Complex(dre, dim) - 2.0 * g(l)) / (2 * g.norm()));
  }
  return worst;
}

inline std::vector<AncRecord> run_anc(const AncConfig& cfg) {
  const Vec3 lo(-cfg.region_half, -cfg.region_half, 0), hi(cfg.region_half, cfg.region_half, 0);
  const auto quad = RegionQuadrature::box(lo, hi, cfg.quad_spacing);
  std::vector<AncRecord> out;
  for (double f : cfg.frequencies) {
    const double k = 2 * kPi * f / cfg.c;
    const CMatrix G = transfer_matrix(cfg.mics, cfg.sources, k);
    const CVector d = transfer_matrix(cfg.mics, {cfg.primary}, k).col(0);
    const CMatrix weights[2] = {CMatrix::Identity(cfg.mics.size(), cfg.mics.size()),
                                anc_region_weighting(cfg.mics, quad, k, cfg.lambda, cfg.kernel)};
    const char* names[2] = {"MPC", "KI"};
    for (int m = 0; m < 2; ++m) {
      const AncProblem p{G, d, weights[m]};
      AncRecord r;
      r.frequency = f;
      r.method = names[m];
      r.converged_db = regional_power_db(cfg, quad.points, k, p.converged());
      CVector w = CVector::Zero(G.cols());
      const double mu = cfg.mu_rel * p.max_step();
      double prev = p.cost(w);
      for (int i = 0; i < cfg.iterations; ++i) {
        w = p.step(w, mu);
        const double cost = p.cost(w);
        if (cost > prev * (1 + 1e-12)) r.cost_monotone = false;
        prev = cost;
      }
      r.iterated_db = regional_power_db(cfg, quad.points, k, w);
      CVector probe(G.cols());
      for (int l = 0; l < probe.size(); ++l) probe(l) = 0.01 * Complex(std::cos(l + 1.0), std::sin(2.0 * l));
      r.gradient_rel_err = anc_gradient_check(p, probe);
      out.push_back(r);
    }
  }
  return out;
}

inline void write_anc_csv(std::ostream& os, const std::vector<AncRecord>& recs) {
  os << "frequency,method,converged_db,iterated_db,cost_monotone,gradient_rel_err\n";
  for (const auto& r : recs)
    os << fmt17(r.frequency) << ',' << r.method << ',' << fmt17(r.converged_db) << ',' << fmt17(r.iterated_db)
       << ',' << (r.cost_monotone ? "true" : "false") << ',' << fmt17(r.gradient_rel_err) << '\n';
}

}  // namespace sfe
