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

#include <algorithm>
#include <cmath>

#include "smoothgate/errors.hpp"
#include "smoothgate/filterfn.hpp"
#include "support.hpp"

namespace smoothgate {
namespace {

using testing::kTwoPi;
constexpr double kPi = std::numbers::pi;

TEST(OmegaGrid, SortedAndDense) {
  const std::vector<double> dense = {3e4};
  const std::vector<double> g = default_omega_grid(1e2, 1e7, 100, dense);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  EXPECT_DOUBLE_EQ(g.front(), 1e2);
  EXPECT_DOUBLE_EQ(g.back(), 1e7);
  const auto near = std::count_if(g.begin(), g.end(), [](double w) { return w > 3e4 / 1.3 && w < 3e4 * 1.3; });
  EXPECT_GE(near, 40);
  EXPECT_THROW(default_omega_grid(1e3, 1e2, 10), ParameterError);
}

TEST(Walsh, LowFrequencyLimits) {
  const double om = kTwoPi * 5e3;
  const SpinStateVariances v = default_variances();
  const std::vector<double> w = {1e-3};
  for (int k : {2, 4}) {
    const WalshGateParams p = WalshGateParams::calibrated(k, om);
    // Sign-flipped loops cancel the displacement; the angle term survives.
    const double limit = kPi * kPi / (128.0 * k * om * om) * v.lambda_S2_sq;
    const FilterFunction a = filter_function_walsh_analytic(p, 10.0, v, w);
    const FilterFunction n = filter_function_numeric(build_walsh_schedule(p), 10.0, v, w);
    EXPECT_NEAR(a.total[0], limit, 1e-6 * limit) << k;
    EXPECT_NEAR(n.total[0], limit, 1e-6 * limit) << k;
    EXPECT_LT(n.displacement[0], 1e-12 * limit) << k;
  }
}

TEST(Walsh, SingleLoopStaticComponents) {
  // Static eps on one loop: int gamma dt = (Omega / 2 delta) T, int |gamma|^2 dt = 2 T (Omega / 2 delta)^2.
  const WalshGateParams p = WalshGateParams::calibrated(1, kTwoPi * 5e3);
  const BranchTrajectory tr = propagate_displacement(build_walsh_schedule(p), 1.0);
  const FourierComponents c = fourier_components(tr, 0.0);
  const double T = p.gate_time(), r = p.omega_g / (2 * p.delta_g);
  // Tolerance is the sampled-trajectory quadrature error at 64 points per period.
  EXPECT_NEAR(std::abs(c.alpha_cos), r * T, 1e-6 * r * T);
  EXPECT_LT(std::abs(c.alpha_sin), 1e-12 * r * T);
  EXPECT_NEAR(c.dtheta_cos, 2 * 2 * T * r * r, 1e-6 * 4 * T * r * r);
}

TEST(Walsh, AnalyticMatchesNumeric) {
  const std::vector<double> grid = default_omega_grid(1e2, 1e6, 60);
  for (int k : {1, 2, 4}) {
    const WalshGateParams p = WalshGateParams::calibrated(k, kTwoPi * 5e3, -1);
    const FilterFunction a = filter_function_walsh_analytic(p, 3.0, default_variances(), grid);
    const FilterFunction n = filter_function_numeric(build_walsh_schedule(p), 3.0, default_variances(), grid);
    const double peak = *std::max_element(a.total.begin(), a.total.end());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (a.total[i] < 1e-3 * peak) continue;
      EXPECT_NEAR(n.total[i], a.total[i], 1e-4 * a.total[i]) << "K=" << k << " omega=" << grid[i];
    }
  }
}

TEST(Filter, PhaseAverage) {
  const PulseSchedule s = build_smooth_schedule(testing::experiment_gate());
  const BranchTrajectory tr = propagate_displacement(s, 1.0, make_time_grid(s, 64, 1e5));
  const std::vector<double> w = {3e4};
  const FilterFunction f = filter_function_from_trajectory(tr, 2.0, default_variances(), w);
  const double avg = 0.5 * (filter_value_at_phase(tr, w[0], 0.0, 2.0, default_variances()) +
                            filter_value_at_phase(tr, w[0], -kPi / 2, 2.0, default_variances()));
  EXPECT_NEAR(f.total[0], avg, 1e-12 * avg);
  EXPECT_NEAR(f.total[0], f.displacement[0] + f.angle[0], 1e-12 * avg);
}

TEST(Filter, ThermalWeightingOnlyScalesDisplacement) {
  const PulseSchedule s = build_walsh_schedule(WalshGateParams::calibrated(2, kTwoPi * 5e3));
  const std::vector<double> w = {1e4, 1e5};
  const FilterFunction a = filter_function_numeric(s, 0.0, default_variances(), w);
  const FilterFunction b = filter_function_numeric(s, 10.0, default_variances(), w);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(b.displacement[i], 21.0 * a.displacement[i], 1e-12 * b.displacement[i]);
    EXPECT_DOUBLE_EQ(b.angle[i], a.angle[i]);
  }
}

TEST(Filter, RejectsUnderresolvedTrajectory) {
  const PulseSchedule s = build_walsh_schedule(WalshGateParams::calibrated(1, kTwoPi * 5e3));
  const BranchTrajectory tr = propagate_displacement(s, 1.0);
  EXPECT_THROW(fourier_components(tr, 1e9), GridResolutionError);
  const std::vector<double> bad = {-1.0};
  EXPECT_THROW(filter_function_numeric(s, 0.0, default_variances(), bad), ParameterError);
}

TEST(NoiseIntegral, ConstantOracle) {
  FilterFunction f;
  f.omega = {1.0, 2.0, 3.0, 4.0};
  f.total = {2.0, 2.0, 2.0, 2.0};
  const NoiseIntegral r = noise_infidelity_integral(f, SampledPsd{{0.0, 10.0}, {3.0, 3.0}});
  EXPECT_NEAR(r.value, 3.0 * 2.0 * 3.0, 1e-12);
  const NoiseIntegral band = noise_infidelity_integral(f, PowerLawPsd{3.0, 0.0, 1.5, 2.5});
  EXPECT_NEAR(band.value, 6.0, 1e-12);
}

TEST(NoiseIntegral, OneOverFPrefersSmoothGate) {
  const std::vector<double> grid = default_omega_grid(1e2, 1e6, 300);
  const FilterFunction fs =
      filter_function_numeric(build_smooth_schedule(testing::comparison_gate()), 0.0, default_variances(), grid);
  const FilterFunction fw = filter_function_numeric(build_walsh_schedule(WalshGateParams::calibrated(4, kTwoPi * 5e3)),
                                                    0.0, default_variances(), grid);
  const PowerLawPsd psd{1.0, 1.0, 1e2, 1e6};
  const NoiseIntegral is = noise_infidelity_integral(fs, psd), iw = noise_infidelity_integral(fw, psd);
  EXPECT_LT(is.value, iw.value);
  EXPECT_LT(is.error_estimate, 0.05 * is.value);
}

TEST(NoiseIntegral, Errors) {
  FilterFunction f;
  f.omega = {1.0, 2.0};
  f.total = {1.0, 1.0};
  EXPECT_THROW(noise_infidelity_integral(f, PowerLawPsd{1.0, 0.0, 5.0, 6.0}), ParameterError);
  EXPECT_THROW(noise_infidelity_integral(f, PowerLawPsd{1.0, 1.0, 0.0, 6.0}), ParameterError);
  EXPECT_THROW(noise_infidelity_integral(f, SampledPsd{{1.0, 0.5}, {1.0, 1.0}}), ParameterError);
  EXPECT_THROW(noise_infidelity_integral(f, SampledPsd{{0.5, 1.0}, {-1.0, 1.0}}), ParameterError);
}

}  // namespace
}  // namespace smoothgate
