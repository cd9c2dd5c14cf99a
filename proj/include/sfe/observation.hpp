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

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sfe/radial.hpp"
#include "sfe/tdesign_data.hpp"
#include "sfe/wavefuncs.hpp"

namespace sfe {

enum class DirectivityKind { kOmni, kBidirectional, kFirstOrder };

struct Directivity {
  int max_order = 0;
  CVector d = CVector::Ones(1);

  // gamma(x) = sum d_{nu,mu} Y_{nu,mu}(x).
  Complex response(const Vec3& x) const {
    const auto y = sph_harm_all(max_order, x);
    Complex acc = 0.0;
    for (int i = 0; i < d.size(); ++i) acc += d(i) * y[i];
    return acc;
  }
};

inline Directivity make_directivity(DirectivityKind kind, const Vec3& y = Vec3::UnitZ(), double a = 1.0) {
  Directivity out;
  if (kind == DirectivityKind::kOmni) return out;
  require_unit(y, "orientation");
  double c0 = 0.0, c1 = 1.0 / 3.0;
  if (kind == DirectivityKind::kFirstOrder) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("first-order parameter a must lie in [0,1]");
    c0 = a;
    c1 = (1.0 - a) / 3.0;
  }
  const auto yy = sph_harm_all(1, y);
  out.max_order = 1;
  out.d = CVector::Zero(4);
  out.d(0) = c0;
  for (int i = 1; i < 4; ++i) out.d(i) = c1 * std::conj(yy[i]);
  return out;
}

struct Microphone {
  Vec3 position = Vec3::Zero();
  DirectivityKind kind = DirectivityKind::kOmni;
  Vec3 orientation = Vec3::UnitZ();
  double a = 1.0;
  Directivity directivity;

  static Microphone omni(const Vec3& p) { return {p, DirectivityKind::kOmni, Vec3::UnitZ(), 1.0, {}}; }
  static Microphone first_order(const Vec3& p, const Vec3& y, double a) {
    return {p, DirectivityKind::kFirstOrder, y, a, make_directivity(DirectivityKind::kFirstOrder, y, a)};
  }
  static Microphone bidirectional(const Vec3& p, const Vec3& y) {
    return {p, DirectivityKind::kBidirectional, y, 0.0, make_directivity(DirectivityKind::kBidirectional, y)};
  }
};

enum class Mount { kOpen, kRigidSphere };

struct ArrayConfig {
  std::vector<Microphone> mics;
  Mount mount = Mount::kOpen;
  double radius = 0.0;

  int size() const { return static_cast<int>(mics.size()); }
  std::vector<Vec3> positions() const {
    std::vector<Vec3> p;
    for (const auto& m : mics) p.push_back(m.position);
    return p;
  }
  bool all_omni() const {
    for (const auto& m : mics)
      if (m.directivity.max_order > 0) return false;
    return true;
  }
  void validate() const {
    if (mics.empty()) throw std::invalid_argument("array has no microphones");
    if (mount == Mount::kRigidSphere) {
      if (!(radius > 0)) throw std::invalid_argument("rigid mount needs a positive radius");
      for (const auto& m : mics) {
        if (std::abs(m.position.norm() - radius) > 1e-9)
          throw std::invalid_argument("rigid mount needs all microphones on the sphere");
        if (m.directivity.max_order != 0)
          throw std::invalid_argument("rigid mount needs omnidirectional microphones");
      }
    }
  }
};

struct NoiseModel {
  double snr_db = 30.0;
  std::uint64_t seed = 0;
  bool enabled = true;

  static NoiseModel none() { return {0.0, 0, false}; }
};

struct ObservationVector {
  CVector s;
  CVector clean;
  double noise_variance = 0.0;
};

// Observation of a field given its expansion about the microphone position.
inline Complex observe_coefficients(const Microphone& mic, const CoefficientSet& c) {
  const auto& d = mic.directivity;
  if (c.order < d.max_order) throw std::invalid_argument("coefficient order below directivity order");
  if ((c.origin - mic.position).norm() > 1e-12)
    throw std::invalid_argument("coefficients must be expanded about the microphone");
  Complex acc = 0.0;
  for (int i = 0; i < d.d.size(); ++i) acc += std::conj(d.d(i)) * c.values(i);
  return acc;
}

inline Complex observe_plane_wave(const Microphone& mic, const Vec3& x_inc, double k) {
  return std::conj(mic.directivity.response(x_inc)) * plane_wave(mic.position, x_inc, k);
}

inline std::vector<Vec3> t_design(int t) {
  for (const auto& e : detail::kDesigns) {
    if (e.t == t) {
      std::vector<Vec3> out;
      for (const auto& p : e.points) out.emplace_back(p[0], p[1], p[2]);
      return out;
    }
  }
  throw std::invalid_argument("no spherical design stored for t = " + std::to_string(t));
}

inline std::vector<int> available_designs() {
  std::vector<int> ts;
  for (const auto& e : detail::kDesigns) ts.push_back(e.t);
  return ts;
}

struct PlaneWaveField {
  Vec3 direction = Vec3::UnitX();
};
struct PointSourceField {
  Vec3 source = Vec3(2, 0, 0);
};
struct ExpansionField {
  CoefficientSet coefficients;
};
struct CallableField {
  std::function<Complex(const Vec3&)> value;
  std::function<Eigen::Vector3cd(const Vec3&)> gradient;
};

using Field = std::variant<PlaneWaveField, PointSourceField, ExpansionField, CallableField>;

inline Complex field_value(const Field& f, const Vec3& r, double k) {
  return std::visit(
      [&](const auto& v) -> Complex {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PlaneWaveField>) return plane_wave(r, v.direction, k);
        else if constexpr (std::is_same_v<T, PointSourceField>) return green(r, v.source, k);
        else if constexpr (std::is_same_v<T, ExpansionField>) return eval_expansion(v.coefficients, r, k);
        else return v.value(r);
      },
      f);
}

inline bool has_coefficients(const Field& f) { return !std::holds_alternative<CallableField>(f); }

// Expansion of the field about center up to the given order.
inline CoefficientSet field_coefficients(const Field& f, const Vec3& center, int order, double k) {
  return std::visit(
      [&](const auto& v) -> CoefficientSet {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PlaneWaveField>) {
          return plane_wave_coefficients(v.direction, k, center, order);
        } else if constexpr (std::is_same_v<T, PointSourceField>) {
          return point_source_coefficients(v.source, k, center, order);
        } else if constexpr (std::is_same_v<T, ExpansionField>) {
          return translate_coefficients(v.coefficients, center, k, order);
        } else {
          throw std::invalid_argument("callable field has no expansion coefficients");
        }
      },
      f);
}

namespace detail {

// Order-one coefficients of a field from its value and gradient at a point.
inline CoefficientSet first_order_from_gradient(const Vec3& p, Complex u, const Eigen::Vector3cd& g,
                                                double k) {
  CoefficientSet c(1, p);
  c.values(0) = u;
  // Y_{1,mu}(v) = a_mu . v for the degree-one harmonics.
  const double s = std::sqrt(1.5);
  const Eigen::Vector3cd a[3] = {{s, Complex(0, -s), 0.0},
                                 {0.0, 0.0, std::sqrt(3.0)},
                                 {-s, Complex(0, -s), 0.0}};
  for (int i = 0; i < 3; ++i) c.values(1 + i) = kI / k * (a[i].conjugate().array() * g.array()).sum();
  return c;
}

}  // namespace detail

// Noise-free microphone outputs.
inline CVector observe_field(const ArrayConfig& array, const Field& field, double k) {
  array.validate();
  const int M = array.size();
  CVector s(M);
  if (array.mount == Mount::kRigidSphere) {
    const double kR = std::abs(k) * array.radius;
    const int N = default_truncation(k, array.radius) + 5;
    const auto c = field_coefficients(field, Vec3::Zero(), N, k);
    const auto A = radial_response_all(ArrayType::kRigid, N, kR);
    for (int m = 0; m < M; ++m) {
      const auto y = sph_harm_all_unchecked(N, array.mics[m].position);
      Complex acc = 0.0;
      for (int n = 0; n <= N; ++n)
        for (int mu = -n; mu <= n; ++mu) acc += c.values(n * n + n + mu) * A[n] * y[n * n + n + mu];
      s(m) = acc;
    }
    return s;
  }
  for (int m = 0; m < M; ++m) {
    const auto& mic = array.mics[m];
    if (const auto* pw = std::get_if<PlaneWaveField>(&field)) {
      s(m) = observe_plane_wave(mic, pw->direction, k);
    } else if (const auto* cf = std::get_if<CallableField>(&field)) {
      if (mic.directivity.max_order == 0) {
        s(m) = cf->value(mic.position);
      } else {
        if (mic.directivity.max_order > 1 || !cf->gradient)
          throw std::invalid_argument("callable field needs a gradient for directional microphones");
        s(m) = observe_coefficients(
            mic, detail::first_order_from_gradient(mic.position, cf->value(mic.position),
                                                   cf->gradient(mic.position), k));
      }
    } else {
      s(m) = observe_coefficients(mic, field_coefficients(field, mic.position, mic.directivity.max_order, k));
    }
  }
  return s;
}

// Adds circular complex Gaussian noise with variance 10^(-snr/10) * mean |s|^2.
inline ObservationVector add_noise(const CVector& clean, const NoiseModel& noise) {
  ObservationVector out{clean, clean, 0.0};
  if (!noise.enabled) return out;
  const double power = clean.squaredNorm() / clean.size();
  out.noise_variance = std::pow(10.0, -noise.snr_db / 10.0) * power;
  std::mt19937_64 gen(noise.seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(out.noise_variance / 2.0));
  for (int m = 0; m < clean.size(); ++m) {
    const double re = nd(gen);
    const double im = nd(gen);
    out.s(m) += Complex(re, im);
  }
  return out;
}

inline ObservationVector simulate_observation(const ArrayConfig& array, const Field& field, double k,
                                              const NoiseModel& noise) {
  return add_noise(observe_field(array, field, k), noise);
}

// Microphones at R * x_m for a stored t-design.
inline ArrayConfig spherical_array(int t, double R, DirectivityKind kind, double a = 0.5,
                                   Mount mount = Mount::kOpen) {
  ArrayConfig arr;
  arr.mount = mount;
  arr.radius = R;
  for (const auto& x : t_design(t)) {
    if (kind == DirectivityKind::kOmni) arr.mics.push_back(Microphone::omni(R * x));
    else if (kind == DirectivityKind::kFirstOrder) arr.mics.push_back(Microphone::first_order(R * x, x, a));
    else arr.mics.push_back(Microphone::bidirectional(R * x, x));
  }
  return arr;
}

// M microphones uniformly distributed in a ball, with uniformly random
// orientations for directional kinds.
inline ArrayConfig random_ball_array(int M, double R, DirectivityKind kind, double a, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> n;
  ArrayConfig arr;
  arr.radius = R;
  while (arr.size() < M) {
    const Vec3 p(u(gen), u(gen), u(gen));
    if (p.norm() > 1.0) continue;
    Vec3 y(n(gen), n(gen), n(gen));
    y.normalize();
    if (kind == DirectivityKind::kOmni) arr.mics.push_back(Microphone::omni(R * p));
    else if (kind == DirectivityKind::kFirstOrder) arr.mics.push_back(Microphone::first_order(R * p, y, a));
    else arr.mics.push_back(Microphone::bidirectional(R * p, y));
  }
  return arr;
}

inline DirectivityKind parse_directivity_kind(const std::string& s, const std::string& path) {
  if (s == "omni") return DirectivityKind::kOmni;
  if (s == "bidirectional") return DirectivityKind::kBidirectional;
  if (s == "first_order") return DirectivityKind::kFirstOrder;
  throw ConfigError(path, "unknown microphone kind '" + s + "'");
}

namespace detail {

inline Vec3 json_vec3(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected [x, y, z]");
  for (const auto& v : j)
    if (!v.is_number()) throw ConfigError(path, "expected numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace detail

inline ArrayConfig array_from_json(const nlohmann::json& j, const std::string& path = "array") {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  ArrayConfig arr;
  const std::string mount = j.value("mount", std::string("open"));
  if (mount == "open") arr.mount = Mount::kOpen;
  else if (mount == "rigid_sphere") arr.mount = Mount::kRigidSphere;
  else throw ConfigError(path + ".mount", "unknown mount '" + mount + "'");
  if (j.contains("radius")) {
    if (!j["radius"].is_number()) throw ConfigError(path + ".radius", "expected a number");
    arr.radius = j["radius"].get<double>();
  }
  if (!j.contains("mics") || !j["mics"].is_array() || j["mics"].empty())
    throw ConfigError(path + ".mics", "expected a nonempty list");
  for (std::size_t i = 0; i < j["mics"].size(); ++i) {
    const auto& m = j["mics"][i];
    const std::string mp = path + ".mics[" + std::to_string(i) + "]";
    if (!m.is_object() || !m.contains("pos")) throw ConfigError(mp, "expected an object with pos");
    const Vec3 p = detail::json_vec3(m["pos"], mp + ".pos");
    const auto kind = parse_directivity_kind(m.value("kind", std::string("omni")), mp + ".kind");
    if (kind == DirectivityKind::kOmni) {
      arr.mics.push_back(Microphone::omni(p));
      continue;
    }
    if (!m.contains("y")) throw ConfigError(mp + ".y", "orientation required");
    const Vec3 y = detail::json_vec3(m["y"], mp + ".y");
    if (std::abs(y.norm() - 1.0) > 1e-9) throw ConfigError(mp + ".y", "orientation must be a unit vector");
    if (kind == DirectivityKind::kBidirectional) {
      arr.mics.push_back(Microphone::bidirectional(p, y));
    } else {
      const double a = m.value("a", 0.5);
      if (!(a >= 0.0 && a <= 1.0)) throw ConfigError(mp + ".a", "must lie in [0,1]");
      arr.mics.push_back(Microphone::first_order(p, y, a));
    }
  }
  try {
    arr.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return arr;
}

inline nlohmann::json array_to_json(const ArrayConfig& arr) {
  nlohmann::json j;
  j["mount"] = arr.mount == Mount::kOpen ? "open" : "rigid_sphere";
  if (arr.radius > 0) j["radius"] = arr.radius;
  j["mics"] = nlohmann::json::array();
  for (const auto& m : arr.mics) {
    nlohmann::json e;
    e["pos"] = {m.position.x(), m.position.y(), m.position.z()};
    if (m.kind == DirectivityKind::kOmni) {
      e["kind"] = "omni";
    } else {
      e["kind"] = m.kind == DirectivityKind::kBidirectional ? "bidirectional" : "first_order";
      e["y"] = {m.orientation.x(), m.orientation.y(), m.orientation.z()};
      if (m.kind == DirectivityKind::kFirstOrder) e["a"] = m.a;
    }
    j["mics"].push_back(e);
  }
  return j;
}

}  // namespace sfe
