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
#include <numeric>

#include "smoothgate/errors.hpp"
#include "smoothgate/quantum.hpp"
#include "support.hpp"

namespace smoothgate {
namespace {

using testing::kTwoPi;
constexpr double kHalfPi = std::numbers::pi / 2;

TEST(Thermal, WeightsAndTail) {
  for (double nbar : {0.0, 0.5, 3.5, 10.0}) {
    const ThermalEnsemble e = ThermalEnsemble::truncated(nbar);
    EXPECT_NEAR(std::accumulate(e.weights.begin(), e.weights.end(), 0.0), 1.0, 1e-14);
    EXPECT_LT(e.tail_mass, 1e-6);
    if (nbar > 0) {
      const double q = nbar / (nbar + 1);
      EXPECT_NEAR(e.weights[1] / e.weights[0], q, 1e-14);
      EXPECT_GE(e.tail_mass, 0.0);
      // One state fewer would leave more than the tolerance behind.
      EXPECT_GE(std::pow(q, e.n_top()), 1e-6);
    }
  }
  EXPECT_EQ(ThermalEnsemble::truncated(0.0).n_top(), 0);
  EXPECT_THROW(ThermalEnsemble::truncated(-1.0), ParameterError);
}

TEST(Composite, LayoutAndReduction) {
  const SpinVector psi = (basis_state(kUpUp) + basis_state(kDownDown)).normalized();
  const CompositeState s = CompositeState::product(psi, 2, 5);
  EXPECT_EQ(s.amplitudes().size(), 24);
  EXPECT_NEAR(std::abs(s.amplitudes()[CompositeState::index(3, 2, 5)]), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.fock_population(2), 1.0, 1e-15);
  const SpinMatrix rho = s.reduced_spin();
  EXPECT_NEAR(rho(0, 3).real(), 0.5, 1e-15);
  EXPECT_THROW(CompositeState::product(psi, 6, 5), ParameterError);
}

TEST(Propagate, IdealWalshGate) {
  const PulseSchedule s = build_walsh_schedule(WalshGateParams::calibrated(1, kTwoPi * 5e3));
  FockConfig f;
  f.n_max = 16;
  const CompositeState out = propagate(s, CompositeState::product(basis_state(kUpUp), 0, f.n_max), f);
  const GateOutcome g = outcome_from_spin(out.reduced_spin(), basis_state(kUpUp), kHalfPi, 0.0);
  EXPECT_NEAR(g.p_upup, 0.5, 1e-12);
  EXPECT_NEAR(g.p_downdown, 0.5, 1e-12);
  EXPECT_LT(g.p_odd, 1e-12);
  EXPECT_NEAR(g.fidelity, 1.0, 1e-12);
  EXPECT_NEAR(g.gate_angle, kHalfPi, 1e-10);
  EXPECT_NEAR(out.fock_population(0), 1.0, 1e-12);
}

TEST(Propagate, MatchesBranchFactorization) {
  const PulseSchedule s =
      build_smooth_schedule(testing::experiment_gate()).with_basis_phase(0.3).with_detuning_offset(kTwoPi * 700);
  const SpinVector psi = SpinVector(std::complex<double>(0.3, 0.1), 0.5, std::complex<double>(-0.2, 0.4), 0.6).normalized();
  FockConfig f;
  f.n_max = 12;
  for (int n0 : {0, 3}) {
    const CompositeState a = propagate(s, CompositeState::product(psi, n0, f.n_max), f);
    const CompositeState b = branch_factorized_state(s, psi, n0, f.n_max);
    EXPECT_LT((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff(), 1e-10) << n0;
  }
}

TEST(Propagate, PreservesNorm) {
  const PulseSchedule s = build_walsh_schedule(WalshGateParams::calibrated(2, kTwoPi * 5e3)).with_detuning_offset(3e3);
  FockConfig f;
  f.n_max = 20;
  const CompositeState out = propagate(s, CompositeState::product(basis_state(kUpDown), 4, f.n_max), f);
  EXPECT_NEAR(out.norm(), 1.0, 1e-12);
}

TEST(Propagate, DetectsTruncation) {
  const PulseSchedule s = build_walsh_schedule(WalshGateParams::calibrated(1, kTwoPi * 5e3));
  FockConfig f;
  f.n_max = 2;
  EXPECT_THROW(propagate(s, CompositeState::product(basis_state(kUpUp), 1, f.n_max), f), TruncationError);
}

TEST(Propagate, RejectsBadInput) {
  const PulseSchedule s = build_walsh_schedule(WalshGateParams::calibrated(1, kTwoPi * 5e3));
  EXPECT_THROW(propagate_columns(s, Eigen::MatrixXcd::Zero(7, 1), 3), ParameterError);
  EXPECT_THROW(propagate_columns(PulseSchedule{}, Eigen::MatrixXcd::Zero(16, 1), 3), ParameterError);
  const PulseSchedule c = s.with_carrier(default_carrier(s, kTwoPi * 80e3));
  EXPECT_THROW(branch_factorized_state(c, basis_state(kUpUp), 0, 10), ParameterError);
}

TEST(Carrier, CommutingCarrierLeavesGateIntact) {
  const SmoothGateParams p = calibrate_omega_numeric(testing::experiment_gate(), -kHalfPi);
  const PulseSchedule s = build_smooth_schedule(p);
  const PulseSchedule c = s.with_carrier(default_carrier(s, kTwoPi * 80e3, s.basis_phase()));
  const ThermalEnsemble e = ThermalEnsemble::truncated(0.0);
  const GateOutcome a = thermal_average(s, e, basis_state(kUpUp), -kHalfPi);
  const GateOutcome b = thermal_average(c, e, basis_state(kUpUp), -kHalfPi);
  EXPECT_LT(std::abs(a.fidelity - b.fidelity), 1e-5);
  EXPECT_GT(b.fidelity, 1 - 1e-5);
}

TEST(Thermal, InfidelityGrowsWithTemperature) {
  const PulseSchedule s =
      build_walsh_schedule(WalshGateParams::calibrated(2, kTwoPi * 5e3)).with_detuning_offset(kTwoPi * 500);
  const double a = thermal_average(s, ThermalEnsemble::truncated(0.0), basis_state(kUpUp), kHalfPi).infidelity();
  const double b = thermal_average(s, ThermalEnsemble::truncated(2.0), basis_state(kUpUp), kHalfPi).infidelity();
  EXPECT_GT(b, a);
  EXPECT_GT(a, 0.0);
}

TEST(Thermal, ExplicitCutoffMustCoverEnsemble) {
  const PulseSchedule s = build_walsh_schedule(WalshGateParams::calibrated(1, kTwoPi * 5e3));
  FockConfig f;
  f.n_max = 4;
  EXPECT_THROW(thermal_average(s, ThermalEnsemble::truncated(2.0), basis_state(kUpUp), kHalfPi, f), ParameterError);
}

TEST(OffsetScan, WalshOneIsRoughlySymmetric) {
  // The residual scales as (delta + offset)^-2, so the asymmetry grows linearly
  // with the offset; at 0.5 kHz on a 14 kHz gate it is about 15%.
  const PulseSchedule s = build_walsh_schedule(WalshGateParams::calibrated(2, kTwoPi * 5e3));
  const std::vector<double> off = {-kTwoPi * 0.5e3, kTwoPi * 0.5e3};
  const auto rows = offset_scan(s, off, ThermalEnsemble::truncated(1.0), basis_state(kUpUp), kHalfPi);
  ASSERT_EQ(rows.size(), 2u);
  const double a = rows[0].outcome.p_odd, b = rows[1].outcome.p_odd;
  EXPECT_LT(std::abs(a - b), 0.2 * std::max(a, b));
}

TEST(CalibrationScan, CrossingAndBracketFailure) {
  const SmoothGateParams p = calibrate_omega_adiabatic(testing::experiment_gate(), -kHalfPi);
  const std::vector<double> grid = {-kTwoPi * 24e3, -kTwoPi * 22e3, -kTwoPi * 21e3, -kTwoPi * 19e3};
  const CalibrationScan scan = calibration_scan(p, grid, basis_state(kUpUp), ThermalEnsemble::truncated(0.0));
  EXPECT_NEAR(scan.crossing_delta_min / kTwoPi, -21.7e3, 0.05 * 21.7e3);
  const std::vector<double> none = {-kTwoPi * 40e3, -kTwoPi * 35e3};
  EXPECT_THROW(calibration_scan(p, none, basis_state(kUpUp), ThermalEnsemble::truncated(0.0)), NumericError);
}

}  // namespace
}  // namespace smoothgate
