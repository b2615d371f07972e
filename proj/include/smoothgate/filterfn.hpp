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

#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "smoothgate/schedule.hpp"
#include "smoothgate/semiclassical.hpp"
#include "smoothgate/spin.hpp"

namespace smoothgate {

// Filter function for mode-frequency noise eps(t) = cos(omega t + phi), per
// unit eps^2, averaged over phi in {0, -pi/2}:
//   S_phi = (2 nbar + 1) |alpha_phi|^2 lambda_S^2 + (dtheta_phi^2 / 4) lambda_S2^2,
//   alpha_phi = int cos(omega t + phi) gamma dt,
//   dtheta_phi = 2 int cos(omega t + phi) |gamma|^2 dt,
// with gamma the unit-eigenvalue displacement.
struct FilterFunction {
  std::vector<double> omega;
  std::vector<double> total;
  std::vector<double> displacement;
  std::vector<double> angle;
  double nbar = 0.0;
  std::string phase_average = "phi in {0, -pi/2}";
};

struct FourierComponents {
  std::complex<double> alpha_cos, alpha_sin;
  double dtheta_cos = 0.0, dtheta_sin = 0.0;
};

// Log-spaced grid on [lo, hi] with extra points clustered around each entry
// of `dense_near`.
std::vector<double> default_omega_grid(double lo = 1e2, double hi = 1e7, std::size_t n = 400,
                                       std::span<const double> dense_near = {});

FourierComponents fourier_components(const BranchTrajectory& traj, double omega);

// Filter function at a single noise phase phi (no averaging).
double filter_value_at_phase(const BranchTrajectory& traj, double omega, double phi, double nbar,
                             const SpinStateVariances& vars);

FilterFunction filter_function_from_trajectory(const BranchTrajectory& traj, double nbar,
                                               const SpinStateVariances& vars, std::span<const double> omega_grid);

FilterFunction filter_function_numeric(const PulseSchedule& s, double nbar, const SpinStateVariances& vars,
                                       std::span<const double> omega_grid);

FilterFunction filter_function_walsh_analytic(const WalshGateParams& p, double nbar, const SpinStateVariances& vars,
                                              std::span<const double> omega_grid);

struct PowerLawPsd {
  double amplitude = 0.0;  // P(omega) = amplitude * omega^(-exponent) on [omega_low, omega_high]
  double exponent = 0.0;
  double omega_low = 0.0;
  double omega_high = 0.0;
};

struct SampledPsd {
  std::vector<double> omega;
  std::vector<double> power;  // linear interpolation, zero outside the grid
};

using NoisePsd = std::variant<PowerLawPsd, SampledPsd>;

void validate_psd(const NoisePsd& p);
double psd_value(const NoisePsd& p, double omega);

struct NoiseIntegral {
  double value = 0.0;
  double error_estimate = 0.0;
};

NoiseIntegral noise_infidelity_integral(const FilterFunction& f, const NoisePsd& p);

}  // namespace smoothgate
