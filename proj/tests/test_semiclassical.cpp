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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "smoothgate/errors.hpp"
#include "smoothgate/schedule.hpp"
#include "smoothgate/semiclassical.hpp"
#include "smoothgate/spin.hpp"
#include "support.hpp"

namespace smoothgate {
namespace {

using testing::kTwoPi;
using cd = std::complex<double>;

PulseSchedule constant(double omega, double delta, double duration) {
  return PulseSchedule({Segment{duration, [omega](double) { return omega; }, [delta](double) { return delta; }, 0.0}});
}

TEST(Displacement, ClosedFormForConstantDrive) {
  const double om = kTwoPi * 5e3, de = kTwoPi * 23e3, T = 1.7 * kTwoPi / de;
  const BranchTrajectory tr = propagate_displacement(constant(om, de, T), 1.0);
  for (std::size_t k = 0; k < tr.t.size(); k += 7) {
    const double t = tr.t[k];
    const cd want = -(om / (2.0 * de)) * (std::exp(cd(0, de * t)) - 1.0);
    ASSERT_LT(std::abs(tr.gamma[k] - want), 1e-12) << t;
    const double theta = om * om / (4 * de) * (t - std::sin(de * t) / de);
    ASSERT_NEAR(tr.theta[k], theta, 1e-11) << t;
  }
}

TEST(Displacement, LoopClosure) {
  for (int m = 1; m <= 4; ++m) {
    const double om = kTwoPi * 5e3, de = -kTwoPi * 17e3;
    const BranchTrajectory tr = propagate_displacement(constant(om, de, m * kTwoPi / std::abs(de)), 2.0);
    EXPECT_LT(std::abs(tr.final_gamma()), 1e-10) << m;
  }
}

TEST(Displacement, ScalesWithEigenvalue) {
  const PulseSchedule s = build_smooth_schedule(testing::experiment_gate());
  const BranchTrajectory a = propagate_displacement(s, 1.0), b = propagate_displacement(s, -2.0);
  EXPECT_LT(std::abs(b.final_gamma() + 2.0 * a.final_gamma()), 1e-12);
  EXPECT_NEAR(b.final_theta(), 4.0 * a.final_theta(), 1e-10);
}

TEST(Displacement, FixedStepAgreesWithAdaptive) {
  const PulseSchedule s = build_walsh_schedule(WalshGateParams::calibrated(2, kTwoPi * 5e3));
  IntegratorOptions fixed;
  fixed.force_fixed_step = true;
  const TimeGrid g = make_time_grid(s);
  const BranchTrajectory a = propagate_displacement(s, 1.0, g), b = propagate_displacement(s, 1.0, g, fixed);
  EXPECT_LT(std::abs(a.final_gamma() - b.final_gamma()), 1e-9);
  EXPECT_NEAR(a.final_theta(), b.final_theta(), 1e-9);
}

TEST(Displacement, AdiabaticEliminationImprovesWithSlowerRamps) {
  // Slow amplitude ramps so the detuning ramps dominate the residual; past
  // ~130 us the two detuning-ramp contributions interfere and |gamma| oscillates.
  SmoothGateParams p = testing::experiment_gate();
  p.tau_g = 25e-6;
  double prev = INFINITY;
  for (double tau : {30e-6, 45e-6, 60e-6, 80e-6, 100e-6, 120e-6}) {
    p.tau_d = tau;
    const double g = std::abs(propagate_displacement(build_smooth_schedule(p), 1.0).final_gamma());
    EXPECT_LT(g, prev) << tau;
    prev = g;
  }
}

TEST(Displacement, RejectsBadGrids) {
  const PulseSchedule s = build_smooth_schedule(testing::experiment_gate());
  TimeGrid g = make_time_grid(s);
  TimeGrid coarse;
  coarse.t = {0.0, s.duration()};
  coarse.piece_starts = {0, 1};
  EXPECT_THROW(propagate_displacement(s, 1.0, coarse), GridResolutionError);
  std::swap(g.t[3], g.t[4]);
  EXPECT_THROW(propagate_displacement(s, 1.0, g), GridResolutionError);
  EXPECT_THROW(propagate_displacement(PulseSchedule{}, 1.0), ParameterError);
}

TEST(GateAngle, WalshHitsTarget) {
  for (int k : {1, 2, 4, 8}) {
    const PulseSchedule s = build_walsh_schedule(WalshGateParams::calibrated(k, kTwoPi * 5e3));
    EXPECT_NEAR(gate_angle_numeric(s), std::numbers::pi / 2, 1e-9) << k;
  }
}

TEST(GateAngle, AdiabaticCalibrationNearSixKilohertz) {
  const SmoothGateParams p = calibrate_omega_adiabatic(testing::experiment_gate(), -std::numbers::pi / 2);
  EXPECT_NEAR(p.omega_g / kTwoPi, 6e3, 0.9e3);
  const AdiabaticAngle a = gate_angle_adiabatic(build_smooth_schedule(p));
  EXPECT_NEAR(a.full, -std::numbers::pi / 2, 1e-9);
  EXPECT_TRUE(a.trusted);
  // The adiabatic angle is close to but not exactly the integrated one.
  EXPECT_NEAR(gate_angle_numeric(build_smooth_schedule(p)), -std::numbers::pi / 2, 2e-2);
  EXPECT_THROW(calibrate_omega_adiabatic(testing::experiment_gate(), std::numbers::pi / 2), ParameterError);
}

TEST(GateAngle, NumericCalibrationIsExact) {
  const SmoothGateParams p = calibrate_omega_numeric(testing::experiment_gate(), -std::numbers::pi / 2);
  EXPECT_NEAR(gate_angle_numeric(build_smooth_schedule(p)), -std::numbers::pi / 2, 1e-9);
}

TEST(Perturbative, StaticErrorOnWalshZero) {
  // A small static eps on one loop: alpha = eps * int gamma dt, dtheta = 2 eps int |gamma|^2 dt.
  const WalshGateParams w = WalshGateParams::calibrated(1, kTwoPi * 5e3);
  const BranchTrajectory tr = propagate_displacement(build_walsh_schedule(w), 1.0);
  const double eps = 1e-3;
  const std::vector<double> e(tr.t.size(), eps);
  const PerturbativeInfidelity r = perturbative_infidelity(tr, e, default_variances(), 0.0);
  const double om = w.omega_g, de = w.delta_g, T = kTwoPi / de;
  const cd alpha = eps * (-(om / (2 * de))) * (cd(0, -1) / de * (std::exp(cd(0, de * T)) - 1.0) - T);
  const double dtheta = 2 * eps * std::pow(om / (2 * de), 2) * 2 * T;
  EXPECT_NEAR(std::abs(r.residual_displacement), std::abs(alpha), 1e-6 * std::abs(alpha));
  EXPECT_NEAR(std::abs(r.angle_error), dtheta, 1e-6 * dtheta);
}

TEST(RotatingFrame, PreservesMagnitude) {
  const BranchTrajectory tr = propagate_displacement(build_smooth_schedule(testing::experiment_gate()), 2.0);
  const BranchTrajectory rf = to_rotating_frame(tr);
  EXPECT_TRUE(rf.frame_mapped);
  for (std::size_t k = 0; k < tr.t.size(); k += 11) {
    EXPECT_NEAR(std::abs(rf.gamma[k]), std::abs(tr.gamma[k]), 1e-15);
    EXPECT_LT(std::abs(rf.gamma[k] - tr.gamma[k] * std::exp(cd(0, -tr.eta[k]))), 1e-15);
  }
}

TEST(Spin, EigenbasisAndGate) {
  for (double phi : {0.0, 0.4, -std::numbers::pi / 2}) {
    const SpinMatrix s = collective_spin(phi);
    const SpinEigenbasis e = collective_eigenbasis(phi);
    for (int i = 0; i < 4; ++i) {
      EXPECT_LT((s * e.vector[i] - e.eigenvalue[i] * e.vector[i]).norm(), 1e-14);
      EXPECT_NEAR(e.vector[i].norm(), 1.0, 1e-14);
    }
    const SpinMatrix u = ideal_gate(0.7, phi);
    EXPECT_LT((u.adjoint() * u - SpinMatrix::Identity()).norm(), 1e-13);
  }
  const SpinVector out = ideal_gate(std::numbers::pi / 2, 0.0) * basis_state(kUpUp);
  EXPECT_NEAR(std::norm(out[kUpUp]), 0.5, 1e-14);
  EXPECT_NEAR(std::norm(out[kDownDown]), 0.5, 1e-14);
}

TEST(Spin, Variances) {
  const SpinStateVariances v = default_variances();
  EXPECT_DOUBLE_EQ(v.lambda_S_sq, 2.0);
  EXPECT_DOUBLE_EQ(v.lambda_S2_sq, 4.0);
  const SpinStateVariances w = spin_variances(basis_state(kUpUp), 1.1);
  EXPECT_NEAR(w.lambda_S_sq, 2.0, 1e-13);
  EXPECT_NEAR(w.lambda_S2_sq, 4.0, 1e-13);
  EXPECT_THROW(spin_variances(2.0 * basis_state(kUpUp), 0.0), ParameterError);
}

}  // namespace
}  // namespace smoothgate
