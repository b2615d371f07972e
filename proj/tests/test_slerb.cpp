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
#include <numeric>

#include "smoothgate/errors.hpp"
#include "smoothgate/slerb.hpp"
#include "support.hpp"

namespace smoothgate {
namespace {

using testing::kTwoPi;

const std::vector<int> kLengths = {1, 2, 5, 10, 20, 50, 100, 150, 200, 300, 400, 500};

bool same_up_to_phase(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  const std::complex<double> ov = (a.adjoint() * b).trace() / 2.0;
  return std::abs(std::abs(ov) - 1.0) < 1e-12;
}

TEST(Clifford, GroupStructure) {
  const CliffordGroup& g = CliffordGroup::instance();
  ASSERT_EQ(g.size(), 24);
  for (int i = 0; i < g.size(); ++i) {
    EXPECT_EQ(g.compose(g.inverse(i), i), g.identity());
    for (int j = 0; j < g.size(); ++j) {
      const Eigen::Matrix2cd u = g.element(i).unitary * g.element(j).unitary;
      EXPECT_EQ(g.find(u), g.compose(i, j));
    }
  }
  EXPECT_GT(g.mean_gate_count(), 1.0);
  EXPECT_LT(g.mean_gate_count(), 4.0);
  EXPECT_EQ(g.find(Eigen::Matrix2cd::Identity() * std::complex<double>(0.6, 0.8)), g.identity());
}

TEST(Clifford, CompiledGatesRealizeElements) {
  const CliffordGroup& g = CliffordGroup::instance();
  for (int i = 0; i < g.size(); ++i) {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    for (const CompiledGate& c : g.element(i).gates) u = logical_gate(c.angle, c.phase) * u;
    EXPECT_TRUE(same_up_to_phase(u, g.element(i).unitary)) << i;
  }
}

TEST(Sequence, IdealModelSurvives) {
  for (bool pauli : {false, true}) {
    const SlerbSequence s = generate_sequence(50, 11, pauli);
    const OutcomeProbabilities p = sequence_probabilities(s, IdealModel{});
    EXPECT_NEAR(p.survival, 1.0, 1e-12);
    EXPECT_NEAR(sequence_probabilities(s, ParametricModel{0.0, 0.0}).survival, 1.0, 1e-12);
  }
  const SlerbSequence a = generate_sequence(20, 5, true), b = generate_sequence(20, 5, true);
  EXPECT_EQ(a.cliffords, b.cliffords);
  EXPECT_EQ(a.expect_flipped, b.expect_flipped);
}

TEST(Sequence, FullScheduleInversion) {
  FullScheduleModel m;
  m.gate = build_walsh_schedule(WalshGateParams::calibrated(1, kTwoPi * 5e3));
  m.gate_angle = gate_angle_numeric(m.gate);
  m.n_max = 8;
  const SequenceSimulator sim(m);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const OutcomeProbabilities p = sim.probabilities(generate_sequence(6, seed, true));
    EXPECT_GT(p.survival, 1 - 1e-6) << seed;
  }
}

TEST(Sequence, ParametricMatchesDecayModel) {
  const ParametricModel m{1e-3, 5e-4};
  const SequenceSimulator sim(m);
  for (int n : {1, 50, 200}) {
    double s = 0, l = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const OutcomeProbabilities p = sim.probabilities(generate_sequence(n, seed, true));
      s += p.survival / 100;
      l += p.leak / 100;
    }
    const OutcomeProbabilities d = decay_model(1e-3, 5e-4, n);
    EXPECT_NEAR(s, d.survival, 0.03 * (1 - d.survival)) << n;
    EXPECT_NEAR(l, d.leak, 0.03 * d.leak) << n;
  }
}

TEST(Shots, Multinomial) {
  const ShotCounts a = sample_shots({0.5, 0.3, 0.2}, 100000, 1, 2), b = sample_shots({0.5, 0.3, 0.2}, 100000, 1, 2);
  EXPECT_EQ(a.survival, b.survival);
  EXPECT_EQ(a.survival + a.flip + a.leak, 100000);
  EXPECT_NEAR(a.flip / 1e5, 0.3, 0.005);
}

TEST(DecayModel, SmallRateLimits) {
  const double el = 1e-4, er = 2e-4;
  for (int n : {1, 10, 100}) {
    const OutcomeProbabilities p = decay_model(er, el, n);
    EXPECT_NEAR(p.survival + p.flip + p.leak, 1.0, 1e-15);
    // The inverting Clifford counts, so the slope is per N + 1 gates.
    EXPECT_NEAR(p.leak / (n + 1), el, 0.05 * el) << n;
  }
  EXPECT_DOUBLE_EQ(decay_model(0, 0, 100).survival, 1.0);
}

TEST(ErrorPerGate, Arithmetic) {
  EXPECT_EQ(error_per_gate(0.0, 0.0), 0.0);
  EXPECT_NEAR(error_per_gate(1e-3, 0.0), 5.538e-4, 1e-7);
  EXPECT_NEAR(error_per_gate(1.5e-4, 8e-5), 1.13e-4, 0.01e-4);
}

TEST(Fit, ZeroErrorData) {
  const SlerbDataset d = run_experiment(kLengths, 5, 100, IdealModel{}, 3);
  const DecayFit f = fit_decays(d);
  EXPECT_EQ(f.eps_rb, 0.0);
  EXPECT_EQ(f.eps_leak, 0.0);
  const BootstrapResult b = bootstrap_ci(d, [](const SlerbDataset& x) { return fit_decays(x); }, 100, 1);
  EXPECT_EQ(b.rb.width(), 0.0);
  EXPECT_EQ(b.leak.width(), 0.0);
}

TEST(Fit, ExactModelRecovery) {
  // Synthetic data drawn from the fit model itself.
  const double er = 2e-4, el = 1e-4;
  int within_rb = 0, within_leak = 0;
  double chi2 = 0;
  const int trials = 200;
  std::vector<double> rb, lk;
  for (int t = 0; t < trials; ++t) {
    const SlerbDataset d = synthesize_from_decay_model(er, el, kLengths, 50, 100, 100 + t);
    const DecayFit f = fit_decays(d);
    rb.push_back(f.eps_rb);
    lk.push_back(f.eps_leak);
    chi2 += f.reduced_chi2 / trials;
  }
  auto sd = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
  };
  const double srb = sd(rb), slk = sd(lk);
  for (int t = 0; t < trials; ++t) {
    within_rb += std::abs(rb[t] - er) <= srb;
    within_leak += std::abs(lk[t] - el) <= slk;
  }
  EXPECT_GE(within_rb, 0.6 * trials);
  EXPECT_GE(within_leak, 0.6 * trials);
  EXPECT_NEAR(std::accumulate(rb.begin(), rb.end(), 0.0) / trials, er, 3 * srb / std::sqrt(trials));
  EXPECT_NEAR(std::accumulate(lk.begin(), lk.end(), 0.0) / trials, el, 3 * slk / std::sqrt(trials));
  EXPECT_GT(chi2, 0.5);
  EXPECT_LT(chi2, 1.5);
}

TEST(Fit, Errors) {
  const std::vector<int> two = {1, 2};
  const SlerbDataset d = run_experiment(two, 3, 10, IdealModel{}, 1);
  EXPECT_THROW(fit_decays(d), ParameterError);
  const SlerbDataset e = run_experiment(kLengths, 3, 10, IdealModel{}, 1);
  EXPECT_THROW(fit_decays(e, 3), ParameterError);
  SlerbDataset bad = e;
  bad.records[0].n_flip = 50;
  EXPECT_THROW(bad.validate(), ParameterError);
  EXPECT_THROW(bootstrap_ci(e, [](const SlerbDataset& x) { return fit_decays(x); }, 10, 1), ParameterError);
}

TEST(Bootstrap, DeterministicAndShrinksWithShots) {
  const ParametricModel m{1.5e-4, 8e-5};
  auto fit = [](const SlerbDataset& x) { return fit_decays(x); };
  const SlerbDataset d = run_experiment(kLengths, 20, 100, m, 9);
  const BootstrapResult a = bootstrap_ci(d, fit, 200, 4), b = bootstrap_ci(d, fit, 200, 4);
  EXPECT_EQ(a.rb.lo, b.rb.lo);
  EXPECT_EQ(a.leak.hi, b.leak.hi);

  std::vector<double> w1, w2;
  for (int t = 0; t < 15; ++t) {
    w1.push_back(bootstrap_ci(run_experiment(kLengths, 20, 100, m, 50 + t), fit, 200, t).rb.width());
    w2.push_back(bootstrap_ci(run_experiment(kLengths, 20, 200, m, 50 + t), fit, 200, t).rb.width());
  }
  std::nth_element(w1.begin(), w1.begin() + 7, w1.end());
  std::nth_element(w2.begin(), w2.begin() + 7, w2.end());
  EXPECT_NEAR(w1[7] / w2[7], std::sqrt(2.0), 0.2 * std::sqrt(2.0));
}

TEST(Bootstrap, CoverageOnExactModel) {
  const double er = 2e-4, el = 1e-4;
  int hit_rb = 0, hit_leak = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const SlerbDataset d = synthesize_from_decay_model(er, el, kLengths, 50, 100, 7000 + t);
    const BootstrapResult b = bootstrap_ci(d, [](const SlerbDataset& x) { return fit_decays(x); }, 400, t);
    hit_rb += b.rb.contains(er);
    hit_leak += b.leak.contains(el);
  }
  EXPECT_GE(hit_rb, 0.60 * trials);
  EXPECT_LE(hit_rb, 0.76 * trials);
  EXPECT_GE(hit_leak, 0.60 * trials);
  EXPECT_LE(hit_leak, 0.76 * trials);
}

TEST(Truncation, MarkovianDataIsFlat) {
  const SlerbDataset d = run_experiment(kLengths, 50, 100, ParametricModel{1.5e-4, 8e-5}, 21);
  const std::vector<int> cuts = {50, 150, 300, 500};
  const TruncationScan s = truncation_scan(d, cuts, 300, 5);
  ASSERT_EQ(s.rows.size(), 4u);
  EXPECT_FALSE(s.non_markovian);
  for (const TruncationRow& r : s.rows) EXPECT_GT(r.ci.width(), 0.0);
}

}  // namespace
}  // namespace smoothgate
