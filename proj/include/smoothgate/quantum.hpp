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

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "smoothgate/schedule.hpp"
#include "smoothgate/semiclassical.hpp"
#include "smoothgate/spin.hpp"

namespace smoothgate {

struct FockConfig {
  int n_max = 20;
  double convergence_margin = 0.01;
  void validate() const;
};

// Spin-major ordering: index = spin * (n_max + 1) + n.
class CompositeState {
 public:
  explicit CompositeState(int n_max);
  CompositeState(Eigen::VectorXcd amplitudes, int n_max);
  static CompositeState product(const SpinVector& spin, int n, int n_max);
  static int index(int spin, int n, int n_max) { return spin * (n_max + 1) + n; }

  int n_max() const { return n_max_; }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  Eigen::VectorXcd& amplitudes() { return amp_; }
  double norm() const { return amp_.norm(); }

  SpinMatrix reduced_spin() const;
  double fock_population(int n) const;
  // <a> in the motional state conditioned on spin component `v`.
  std::complex<double> conditional_mean_a(const SpinVector& v) const;

 private:
  Eigen::VectorXcd amp_;
  int n_max_;
};

struct PropagatorOptions {
  double points_per_period = 64.0;
  double truncation_tolerance = 1e-8;
  double taylor_tolerance = 1e-15;
  double norm_tolerance = 1e-9;
};

// Fourth-order Magnus integrator, stepped in the interaction frame of
// delta(t) a^dag a. The result is mapped back by exp(-i eta(t_g) a^dag a).
CompositeState propagate(const PulseSchedule& s, const CompositeState& psi0, const FockConfig& fock,
                         const PropagatorOptions& opt = {});
// Batched form: each column is an initial state.
Eigen::MatrixXcd propagate_columns(const PulseSchedule& s, const Eigen::MatrixXcd& columns, int n_max,
                                   const PropagatorOptions& opt = {});

struct BranchState {
  double eigenvalue = 0.0;
  int n0 = 0;
  Eigen::VectorXcd fock;               // exp(-i eta n) D(s gamma) |n0>
  std::complex<double> displacement;   // s * gamma(t_g), interaction frame
  double phase = 0.0;                  // s^2 theta_unit(t_g)
};

BranchState branch_factorized_propagate(const PulseSchedule& s, double eigenvalue, int n0, int n_max);
// Recombined state for psi0_spin (x) |n0>.
CompositeState branch_factorized_state(const PulseSchedule& s, const SpinVector& psi0, int n0, int n_max);

struct ThermalEnsemble {
  double nbar = 0.0;
  std::vector<double> weights;  // renormalized, index = Fock n
  double tail_mass = 0.0;       // probability above the cutoff before renormalization

  int n_top() const { return static_cast<int>(weights.size()) - 1; }
  static ThermalEnsemble truncated(double nbar, double tail_tolerance = 1e-6);
  static ThermalEnsemble with_cutoff(double nbar, int n_top);
};

struct GateOutcome {
  double p_upup = 0.0;
  double p_downdown = 0.0;
  double p_odd = 0.0;
  double fidelity = 0.0;
  double spin_purity = 0.0;
  double gate_angle = 0.0;  // meaningful for an up-up input
  double target_angle = 0.0;
  double residual_displacement = 0.0;
  double infidelity() const { return 1.0 - fidelity; }
};

GateOutcome outcome_from_spin(const SpinMatrix& rho, const SpinVector& psi0, double target_angle, double basis_phase);

FockConfig default_fock_config(const PulseSchedule& s, const ThermalEnsemble& ens);

GateOutcome thermal_average(const PulseSchedule& s, const ThermalEnsemble& ens, const SpinVector& psi0,
                            double target_angle, std::optional<FockConfig> fock = std::nullopt,
                            const PropagatorOptions& opt = {});

struct CalibrationRow {
  double delta_min = 0.0;
  GateOutcome outcome;
};

struct CalibrationScan {
  std::vector<CalibrationRow> rows;
  double crossing_delta_min = 0.0;
};

CalibrationScan calibration_scan(const SmoothGateParams& base, std::span<const double> delta_min_grid,
                                 const SpinVector& psi0, const ThermalEnsemble& ens,
                                 const PropagatorOptions& opt = {});

struct OffsetRow {
  double offset = 0.0;
  GateOutcome outcome;
};

std::vector<OffsetRow> offset_scan(const PulseSchedule& s, std::span<const double> offsets,
                                   const ThermalEnsemble& ens, const SpinVector& psi0, double target_angle,
                                   const PropagatorOptions& opt = {});

}  // namespace smoothgate
