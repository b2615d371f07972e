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

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace smoothgate {

// Angular frequencies are in rad/s and durations in seconds throughout.

struct SmoothGateParams {
  double delta_max = 0.0;  // signed
  double delta_min = 0.0;  // signed, same sign as delta_max
  double tau_g = 0.0;      // amplitude ramp time
  double tau_d = 0.0;      // detuning ramp time
  double t_c = 0.0;        // constant hold
  int j = 3;
  double omega_g = 0.0;
  // Run the amplitude ramps concurrently with the start/end of the detuning
  // ramps instead of before/after them.
  bool merge_ramps = false;

  void validate() const;
  double gate_time() const;
};

struct WalshGateParams {
  int order_k = 1;  // number of loops K
  double delta_g = 0.0;
  double omega_g = 0.0;

  void validate() const;
  double loop_time() const;
  double gate_time() const;

  // Detuning chosen so that K loops accumulate a gate angle of pi/2:
  // |delta_g| = 2 * omega_g * sqrt(K).
  static WalshGateParams calibrated(int order_k, double omega_g, double sign = 1.0);
};

// Carrier tone applied to both qubits. Linear ramps at both ends and a phase
// inversion at inversion_time.
struct CarrierDrive {
  double rabi = 0.0;
  double phase = 0.0;
  double ramp_time = 0.5e-6;
  double start = 0.0;
  double stop = 0.0;
  double inversion_time = 0.0;

  void validate() const;
  double rabi_at(double t) const;
  double phase_at(double t) const;
};

// Amplitude and detuning are given as functions of time local to the segment.
struct Segment {
  double duration = 0.0;
  std::function<double(double)> omega;
  std::function<double(double)> delta;
  double drive_phase = 0.0;
};

class PulseSchedule {
 public:
  PulseSchedule() = default;
  explicit PulseSchedule(std::vector<Segment> segments);

  double duration() const { return starts_.empty() ? 0.0 : starts_.back(); }
  std::size_t segment_count() const { return segments_.size(); }
  const Segment& segment(std::size_t i) const { return segments_.at(i); }
  double segment_start(std::size_t i) const { return starts_.at(i); }
  double segment_end(std::size_t i) const { return starts_.at(i + 1); }

  // Index of the segment containing t; at an interior boundary the later
  // segment is returned.
  std::size_t segment_at(double t) const;

  double omega(double t) const;
  double delta(double t) const;
  double drive_phase(double t) const;

  // Evaluate using segment `seg` regardless of where t falls. Used by
  // integrators that never step across a boundary.
  double omega_in(std::size_t seg, double t) const;
  double delta_in(std::size_t seg, double t) const;
  double drive_phase_in(std::size_t seg) const;

  // Phase of the spin operator axis: S = sum_i cos(phi) X_i + sin(phi) Y_i.
  double basis_phase() const { return basis_phase_; }
  PulseSchedule with_basis_phase(double phi) const;

  // Static detuning error added to delta(t) everywhere.
  double detuning_offset() const { return detuning_offset_; }
  PulseSchedule with_detuning_offset(double offset) const;

  const std::optional<CarrierDrive>& carrier() const { return carrier_; }
  bool has_carrier() const { return carrier_.has_value() && carrier_->rabi != 0.0; }
  PulseSchedule with_carrier(std::optional<CarrierDrive> carrier) const;

  // Segment boundaries plus carrier kinks, sorted, including 0 and duration().
  std::vector<double> breakpoints() const;

  double max_abs_delta(std::size_t seg, int samples = 33) const;
  double max_abs_delta() const;
  double max_omega() const;
  int phase_flip_count() const;

 private:
  std::vector<Segment> segments_;
  std::vector<double> starts_;
  double basis_phase_ = 0.0;
  double detuning_offset_ = 0.0;
  std::optional<CarrierDrive> carrier_;
};

enum class RampDirection { kUp, kDown };

// delta(t) on the down ramp, t in [0, tau_d].
double eval_detuning_ramp(const SmoothGateParams& p, double t);
double eval_amplitude_ramp(double tau_g, double omega_g, double t, RampDirection direction);

PulseSchedule build_smooth_schedule(const SmoothGateParams& p);

// Sign of loop m in the Walsh function of index `order` (= K-1).
int walsh_function(int order, int m);
PulseSchedule build_walsh_schedule(const WalshGateParams& p);

// Carrier spanning the whole schedule with its phase inverted at the midpoint.
CarrierDrive default_carrier(const PulseSchedule& s, double rabi, double phase = 0.0);

struct AdiabaticityProfile {
  std::vector<double> t;
  std::vector<double> metric;  // d/dt(alpha_dot/delta) / delta
  double peak = 0.0;
  double peak_time = 0.0;
};

AdiabaticityProfile adiabaticity_profile(const PulseSchedule& s, std::size_t samples_per_segment = 400);

struct ScheduleSamples {
  std::vector<double> t, omega, delta, phase;
};
ScheduleSamples sample_schedule(const PulseSchedule& s, std::size_t n);

}  // namespace smoothgate
