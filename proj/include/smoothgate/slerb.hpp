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
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "smoothgate/quantum.hpp"
#include "smoothgate/schedule.hpp"

namespace smoothgate {

// Logical qubit {|up up>, |down down>}. The entangling gate exp(i theta S_phi^2 / 4)
// restricted to it is exp(i theta/2) exp(i (theta/2) sigma_{2 phi}), so with
// theta = pi/2 the logical rotation R_psi(pi/2) = exp(-i pi/4 sigma_psi) needs
// phi = (psi - pi) / 2.
struct CompiledGate {
  double angle = 0.0;
  double phase = 0.0;
};

Eigen::Matrix2cd logical_gate(double angle, double phase);

struct SubspaceClifford {
  int index = 0;
  Eigen::Matrix2cd unitary;
  std::vector<CompiledGate> gates;  // in time order
};

class CliffordGroup {
 public:
  static const CliffordGroup& instance();

  int size() const { return static_cast<int>(elements_.size()); }
  const SubspaceClifford& element(int i) const { return elements_.at(i); }
  int identity() const { return 0; }
  int pauli_x() const { return pauli_x_; }
  int compose(int later, int earlier) const { return table_[later][earlier]; }  // U_later U_earlier
  int inverse(int i) const { return inverse_[i]; }
  // Index of u up to global phase, or -1.
  int find(const Eigen::Matrix2cd& u) const;
  double mean_gate_count() const;

 private:
  CliffordGroup();
  std::vector<SubspaceClifford> elements_;
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
  int pauli_x_ = -1;
};

struct SlerbSequence {
  int length = 0;
  std::uint64_t seed = 0;
  std::vector<int> cliffords;
  int inverse = 0;
  bool pauli_randomized = false;
  bool expect_flipped = false;  // ideal final state is |down down>

  std::vector<CompiledGate> gates() const;
};

SlerbSequence generate_sequence(int length, std::uint64_t seed, bool pauli_randomize);

struct IdealModel {};

// Per gate: logical depolarizing with probability 2 eps_rb / g and symmetric
// population exchange with the odd-parity subspace with probability eps_leak / g,
// where g is the mean compiled gate count per Clifford.
struct ParametricModel {
  double eps_rb = 0.0;
  double eps_leak = 0.0;
};

// Gates simulated with the full spin-motion propagator. `gate` must be a
// basis-phase-0 schedule; other bases are obtained by conjugating with
// collective z rotations. Consecutive gates are applied back to back.
struct FullScheduleModel {
  PulseSchedule gate;
  double gate_angle = 0.0;  // signed angle realized by `gate`, about +-pi/2
  int n_max = 8;
  int n0 = 0;
  PropagatorOptions options;
};

using ErrorModel = std::variant<IdealModel, ParametricModel, FullScheduleModel>;

struct OutcomeProbabilities {
  double survival = 0.0;
  double flip = 0.0;
  double leak = 0.0;
};

struct ShotCounts {
  int survival = 0;
  int flip = 0;
  int leak = 0;
};

// Precomputed form of a model (full-schedule unitaries are cached).
class SequenceSimulator {
 public:
  explicit SequenceSimulator(const ErrorModel& model);
  OutcomeProbabilities probabilities(const SlerbSequence& seq) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

OutcomeProbabilities sequence_probabilities(const SlerbSequence& seq, const ErrorModel& model);
ShotCounts sample_shots(const OutcomeProbabilities& p, int shots, std::uint64_t seed, std::uint64_t stream);
ShotCounts simulate_sequence(const SlerbSequence& seq, const ErrorModel& model, int shots, std::uint64_t seed);

struct SequenceRecord {
  int length = 0;
  int sequence_id = 0;
  int shots = 0;
  int n_survival = 0;
  int n_flip = 0;
  int n_leak = 0;
};

struct SlerbDataset {
  std::vector<SequenceRecord> records;
  void validate() const;
  std::vector<int> lengths() const;  // distinct, ascending
};

SlerbDataset run_experiment(std::span<const int> lengths, int sequences_per_length, int shots,
                            const ErrorModel& model, std::uint64_t seed, bool pauli_randomize = true);

// Counts drawn directly from the decay model, without per-sequence scatter.
SlerbDataset synthesize_from_decay_model(double eps_rb, double eps_leak, std::span<const int> lengths,
                                         int sequences_per_length, int shots, std::uint64_t seed);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }
};

// Decay model in terms of m = N + 1 Cliffords (the N random ones plus the
// inverting Clifford):
//   L = (1 + (1 - 2 eps_leak)^m) / 2,  z = ((1 - eps_leak)(1 - 2 eps_rb))^m,
//   P_survival = (L + z)/2,  P_flip = (L - z)/2,  P_leak = 1 - L.
OutcomeProbabilities decay_model(double eps_rb, double eps_leak, int length);

struct DecayFit {
  double eps_rb = 0.0;
  double eps_leak = 0.0;
  double eps_flip = 0.0;  // initial slope of P_flip per Clifford
  double eps_2q = 0.0;
  int max_n = 0;
  double reduced_chi2 = 0.0;
  std::optional<Interval> ci_rb, ci_leak, ci_2q;
};

DecayFit fit_decays(const SlerbDataset& data, std::optional<int> max_n = std::nullopt);

double error_per_gate(double eps_rb, double eps_leak);
double error_per_gate(const DecayFit& fit);

struct BootstrapResult {
  Interval rb, leak, two_q;
  int resamples = 0;
};

using FitFunction = std::function<DecayFit(const SlerbDataset&)>;

BootstrapResult bootstrap_ci(const SlerbDataset& data, const FitFunction& fit, int resamples, std::uint64_t seed);

struct TruncationRow {
  int max_n = 0;
  double eps_2q = 0.0;
  Interval ci;
};

struct TruncationScan {
  std::vector<TruncationRow> rows;
  bool non_markovian = false;
};

// Refit at each max_n. Flags non-Markovian behaviour when a truncated estimate
// differs from the full-data one by more than 3 bootstrap standard deviations
// of the paired difference.
TruncationScan truncation_scan(const SlerbDataset& data, std::span<const int> max_ns, int resamples,
                               std::uint64_t seed);

}  // namespace smoothgate
