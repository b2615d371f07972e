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
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "smoothgate/schedule.hpp"
#include "smoothgate/spin.hpp"

namespace smoothgate {

// Frame convention: for a branch with eigenvalue s the displacement obeys
//   d(gamma)/dt = -(i s / 2) Omega(t) exp(i (eta(t) + phi_d(t))),  eta = int delta,
// and the geometric phase is theta = int Im(conj(gamma) d(gamma)). The branch
// propagator in the interaction frame of delta a^dag a is D(gamma) exp(i theta).
struct BranchTrajectory {
  std::vector<double> t;
  std::vector<std::complex<double>> gamma;
  std::vector<double> eta;
  std::vector<double> theta;
  std::vector<std::size_t> piece_starts;  // sample indices of schedule breakpoints
  double eigenvalue = 0.0;
  bool frame_mapped = false;

  std::complex<double> final_gamma() const { return gamma.back(); }
  double final_theta() const { return theta.back(); }
  double final_eta() const { return eta.back(); }
};

struct TimeGrid {
  std::vector<double> t;
  std::vector<std::size_t> piece_starts;
};

// Non-uniform grid with points_per_period samples per local detuning period,
// and at least omega_points per period of omega_max when omega_max > 0.
TimeGrid make_time_grid(const PulseSchedule& s, double points_per_period = 64.0, double omega_max = 0.0,
                        double omega_points = 16.0);

struct IntegratorOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  // Skip the adaptive pair and use the fixed-step fallback directly.
  bool force_fixed_step = false;
  int fixed_substeps = 8;
  double refinement_tol = 1e-8;
};

BranchTrajectory propagate_displacement(const PulseSchedule& s, double branch_eigenvalue, const TimeGrid& grid,
                                        const IntegratorOptions& opt = {});
BranchTrajectory propagate_displacement(const PulseSchedule& s, double branch_eigenvalue);

// Forced-branch gate angle 4 * theta_unit(t_g), i.e. the angle of exp(i theta S^2/4).
double gate_angle_numeric(const PulseSchedule& s);

struct AdiabaticAngle {
  double full = 0.0;     // int (Omega^2 + alpha_dot^2) / delta dt
  double leading = 0.0;  // int Omega^2 / delta dt
  double peak_metric = 0.0;
  bool trusted = true;
};

AdiabaticAngle gate_angle_adiabatic(const PulseSchedule& s, double metric_threshold = 0.1);

// Omega_g rescaled so that the adiabatic angle equals `target` (both terms
// scale as Omega_g^2).
SmoothGateParams calibrate_omega_adiabatic(const SmoothGateParams& p, double target);
// Same with the exact numeric angle.
SmoothGateParams calibrate_omega_numeric(const SmoothGateParams& p, double target);

struct PerturbativeInfidelity {
  std::complex<double> residual_displacement;
  double angle_error = 0.0;
  double nbar = 0.0;
  double total = 0.0;
};

// eps sampled on traj.t. gamma is normalized by the branch eigenvalue, so any
// forced branch gives the same unit-displacement result.
PerturbativeInfidelity perturbative_infidelity(const BranchTrajectory& traj, std::span<const double> eps,
                                               const SpinStateVariances& vars, double nbar);
PerturbativeInfidelity perturbative_infidelity(const BranchTrajectory& traj, const std::function<double(double)>& eps,
                                               const SpinStateVariances& vars, double nbar);

// Mode-frame amplitude: gamma -> gamma * exp(-i eta).
BranchTrajectory to_rotating_frame(const BranchTrajectory& traj);

}  // namespace smoothgate
