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

#include <string>
#include <vector>

#include "sfe/specfun.hpp"

namespace sfe {

enum class ArrayType { kOmni, kFirst, kRigid };

inline std::string to_string(ArrayType t) {
  switch (t) {
    case ArrayType::kOmni: return "omni";
    case ArrayType::kFirst: return "first";
    default: return "rigid";
  }
}

// A_nu for nu = 0..nmax at kR.
inline std::vector<Complex> radial_response_all(ArrayType type, int nmax, double kR, double a = 0.5) {
  if (!(kR > 0)) throw std::invalid_argument("radial response needs kR > 0");
  std::vector<Complex> out(nmax + 1);
  if (type == ArrayType::kRigid) {
    const auto dh = sph_hankel_h1_deriv_all(nmax, kR);
    for (int n = 0; n <= nmax; ++n) out[n] = 1.0 / (ipow(n - 1) * (kR * kR) * dh[n]);
    return out;
  }
  const auto j = sph_bessel_j_all(nmax, kR);
  if (type == ArrayType::kOmni) {
    for (int n = 0; n <= nmax; ++n) out[n] = ipow(-n) * j[n];
    return out;
  }
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("first-order radial response needs a in (0,1)");
  const auto dj = sph_bessel_j_deriv_all(nmax, kR);
  for (int n = 0; n <= nmax; ++n) out[n] = ipow(-n) * (a * j[n] + kI * (1.0 - a) * dj[n]);
  return out;
}

inline Complex radial_response(ArrayType type, int nu, double kR, double a = 0.5) {
  return radial_response_all(type, nu, kR, a)[nu];
}

}  // namespace sfe
