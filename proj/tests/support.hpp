// Copyright 2026 The smoothgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "smoothgate/schedule.hpp"
#include "smoothgate/semiclassical.hpp"

namespace smoothgate::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Experimental smooth gate: separate amplitude ramps, 15.8 us hold.
inline SmoothGateParams experiment_gate() {
  SmoothGateParams p;
  p.delta_max = -kTwoPi * 400e3;
  p.delta_min = -kTwoPi * 21.7e3;
  p.tau_g = 5e-6;
  p.tau_d = 100e-6;
  p.t_c = 15.8e-6;
  p.j = 3;
  p.omega_g = kTwoPi * 6e3;
  return p;
}

// 200 us smooth gate at 5 kHz for comparison against Walsh-3. delta_min is
// solved so that the numeric gate angle is -pi/2.
inline SmoothGateParams comparison_gate() {
  SmoothGateParams p;
  p.delta_max = -kTwoPi * 400e3;
  p.tau_g = 10e-6;
  p.tau_d = 100e-6;
  p.t_c = 0.0;
  p.j = 3;
  p.omega_g = kTwoPi * 5e3;
  p.merge_ramps = true;
  auto err = [p](double dmin_hz) mutable {
    p.delta_min = -kTwoPi * dmin_hz;
    return gate_angle_numeric(build_smooth_schedule(p)) + std::numbers::pi / 2;
  };
  boost::uintmax_t iters = 60;
  const auto r = boost::math::tools::toms748_solve(err, 8e3, 30e3, boost::math::tools::eps_tolerance<double>(40),
                                                   iters);
  p.delta_min = -kTwoPi * 0.5 * (r.first + r.second);
  return p;
}

}  // namespace smoothgate::testing
