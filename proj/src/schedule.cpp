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

#include "smoothgate/schedule.hpp"

#include <bit>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "smoothgate/errors.hpp"

namespace smoothgate {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(double x) { return std::isfinite(x); }

// Unchecked closed forms; safe to evaluate slightly outside their nominal
// interval, which the finite-difference code relies on.
double ramp_profile(double dmax, double dmin, double tau_d, int j, double t) {
  if (t <= 0.0) return dmax;
  if (t >= tau_d) return dmin;
  const double sign = dmax < 0 ? -1.0 : 1.0;
  const double b = std::pow(std::abs(dmax), -j);
  const double c = 2.0 / tau_d * (std::pow(std::abs(dmin), -j) - b);
  const double g = t / 2.0 - tau_d / (4.0 * kPi) * std::sin(2.0 * kPi * t / tau_d);
  return sign * std::pow(b + c * g, -1.0 / j);
}

double sin2_up(double tau_g, double omega_g, double t) {
  const double s = std::sin(kPi * t / (2.0 * tau_g));
  return omega_g * s * s;
}

}  // namespace

void SmoothGateParams::validate() const {
  if (!finite(delta_max) || !finite(delta_min) || !finite(tau_g) || !finite(tau_d) || !finite(t_c) ||
      !finite(omega_g)) {
    throw ParameterError("smooth gate: non-finite parameter");
  }
  if (delta_max == 0.0 || delta_min == 0.0) throw ParameterError("smooth gate: detunings must be nonzero");
  if ((delta_max < 0) != (delta_min < 0)) throw ParameterError("smooth gate: delta_min and delta_max differ in sign");
  if (std::abs(delta_min) > std::abs(delta_max)) throw ParameterError("smooth gate: |delta_min| exceeds |delta_max|");
  if (tau_g <= 0.0 || tau_d <= 0.0) throw ParameterError("smooth gate: ramp times must be positive");
  if (t_c < 0.0) throw ParameterError("smooth gate: negative hold time");
  if (j < 1) throw ParameterError("smooth gate: ramp exponent must be a positive integer");
  if (omega_g <= 0.0) throw ParameterError("smooth gate: omega_g must be positive");
  if (merge_ramps && tau_g > tau_d) throw ParameterError("smooth gate: merged ramps need tau_g <= tau_d");
}

double SmoothGateParams::gate_time() const {
  return merge_ramps ? 2.0 * tau_d + t_c : 2.0 * tau_g + 2.0 * tau_d + t_c;
}

void WalshGateParams::validate() const {
  if (order_k < 1 || (order_k & (order_k - 1)) != 0) throw ParameterError("walsh gate: K must be a power of two");
  if (!finite(delta_g) || delta_g == 0.0) throw ParameterError("walsh gate: delta_g must be finite and nonzero");
  if (!finite(omega_g) || omega_g <= 0.0) throw ParameterError("walsh gate: omega_g must be positive");
}

double WalshGateParams::loop_time() const { return 2.0 * kPi / std::abs(delta_g); }
double WalshGateParams::gate_time() const { return order_k * loop_time(); }

WalshGateParams WalshGateParams::calibrated(int order_k, double omega_g, double sign) {
  WalshGateParams p;
  p.order_k = order_k;
  p.omega_g = omega_g;
  p.delta_g = (sign < 0 ? -2.0 : 2.0) * omega_g * std::sqrt(static_cast<double>(order_k));
  p.validate();
  return p;
}

void CarrierDrive::validate() const {
  if (!finite(rabi) || !finite(phase) || !finite(ramp_time) || !finite(start) || !finite(stop) ||
      !finite(inversion_time)) {
    throw ParameterError("carrier: non-finite parameter");
  }
  if (ramp_time < 0.0) throw ParameterError("carrier: negative ramp time");
  if (stop - start < 2.0 * ramp_time) throw ParameterError("carrier: window shorter than its ramps");
}

double CarrierDrive::rabi_at(double t) const {
  if (t <= start || t >= stop) return 0.0;
  if (ramp_time > 0.0) {
    if (t < start + ramp_time) return rabi * (t - start) / ramp_time;
    if (t > stop - ramp_time) return rabi * (stop - t) / ramp_time;
  }
  return rabi;
}

double CarrierDrive::phase_at(double t) const { return t < inversion_time ? phase : phase + kPi; }

PulseSchedule::PulseSchedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
  starts_.reserve(segments_.size() + 1);
  double acc = 0.0;
  starts_.push_back(acc);
  for (const Segment& s : segments_) {
    if (!finite(s.duration) || s.duration < 0.0) throw ParameterError("schedule: invalid segment duration");
    if (!s.omega || !s.delta) throw ParameterError("schedule: segment without amplitude or detuning function");
    acc += s.duration;
    starts_.push_back(acc);
  }
}

std::size_t PulseSchedule::segment_at(double t) const {
  if (segments_.empty()) throw DomainError("schedule: empty");
  auto it = std::upper_bound(starts_.begin() + 1, starts_.end() - 1, t);
  std::size_t i = static_cast<std::size_t>(it - starts_.begin()) - 1;
  // Skip zero-length segments so evaluation lands on a real one.
  while (i + 1 < segments_.size() && segments_[i].duration == 0.0) ++i;
  return i;
}

double PulseSchedule::omega_in(std::size_t seg, double t) const {
  return segments_[seg].omega(t - starts_[seg]);
}

double PulseSchedule::delta_in(std::size_t seg, double t) const {
  return segments_[seg].delta(t - starts_[seg]) + detuning_offset_;
}

double PulseSchedule::drive_phase_in(std::size_t seg) const { return segments_[seg].drive_phase; }

double PulseSchedule::omega(double t) const { return omega_in(segment_at(t), t); }
double PulseSchedule::delta(double t) const { return delta_in(segment_at(t), t); }
double PulseSchedule::drive_phase(double t) const { return drive_phase_in(segment_at(t)); }

PulseSchedule PulseSchedule::with_basis_phase(double phi) const {
  PulseSchedule s = *this;
  s.basis_phase_ = phi;
  return s;
}

PulseSchedule PulseSchedule::with_detuning_offset(double offset) const {
  if (!finite(offset)) throw ParameterError("schedule: non-finite detuning offset");
  PulseSchedule s = *this;
  s.detuning_offset_ = offset;
  return s;
}

PulseSchedule PulseSchedule::with_carrier(std::optional<CarrierDrive> carrier) const {
  if (carrier) carrier->validate();
  PulseSchedule s = *this;
  s.carrier_ = std::move(carrier);
  return s;
}

std::vector<double> PulseSchedule::breakpoints() const {
  std::vector<double> b(starts_.begin(), starts_.end());
  if (has_carrier()) {
    const CarrierDrive& c = *carrier_;
    for (double x : {c.start, c.start + c.ramp_time, c.inversion_time, c.stop - c.ramp_time, c.stop}) {
      if (x > 0.0 && x < duration()) b.push_back(x);
    }
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

double PulseSchedule::max_abs_delta(std::size_t seg, int samples) const {
  double m = 0.0;
  const double a = starts_[seg];
  const double d = segments_[seg].duration;
  for (int k = 0; k < samples; ++k) {
    const double t = a + d * k / std::max(1, samples - 1);
    m = std::max(m, std::abs(delta_in(seg, t)));
  }
  return m;
}

double PulseSchedule::max_abs_delta() const {
  double m = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) m = std::max(m, max_abs_delta(i));
  return m;
}

double PulseSchedule::max_omega() const {
  double m = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    for (int k = 0; k <= 32; ++k) {
      const double t = starts_[i] + segments_[i].duration * k / 32.0;
      m = std::max(m, std::abs(omega_in(i, t)));
    }
  }
  return m;
}

int PulseSchedule::phase_flip_count() const {
  int flips = 0;
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (segments_[i].drive_phase != segments_[i - 1].drive_phase) ++flips;
  }
  return flips;
}

double eval_detuning_ramp(const SmoothGateParams& p, double t) {
  p.validate();
  if (!(t >= 0.0 && t <= p.tau_d)) throw DomainError("detuning ramp: t outside [0, tau_d]");
  return ramp_profile(p.delta_max, p.delta_min, p.tau_d, p.j, t);
}

double eval_amplitude_ramp(double tau_g, double omega_g, double t, RampDirection direction) {
  if (!(tau_g > 0.0)) throw ParameterError("amplitude ramp: tau_g must be positive");
  if (!(t >= 0.0 && t <= tau_g)) throw DomainError("amplitude ramp: t outside [0, tau_g]");
  return direction == RampDirection::kUp ? sin2_up(tau_g, omega_g, t) : sin2_up(tau_g, omega_g, tau_g - t);
}

PulseSchedule build_smooth_schedule(const SmoothGateParams& p) {
  p.validate();
  const double dmax = p.delta_max, dmin = p.delta_min, tau_d = p.tau_d, tau_g = p.tau_g, og = p.omega_g;
  const int j = p.j;
  auto ramp = [=](double t) { return ramp_profile(dmax, dmin, tau_d, j, t); };
  auto flat = [og](double) { return og; };
  auto up = [=](double t) { return sin2_up(tau_g, og, t); };
  auto down = [=](double t) { return sin2_up(tau_g, og, tau_g - t); };

  std::vector<Segment> segs;
  auto add = [&](double duration, std::function<double(double)> om, std::function<double(double)> de) {
    if (duration > 0.0) segs.push_back(Segment{duration, std::move(om), std::move(de), 0.0});
  };
  if (!p.merge_ramps) {
    add(tau_g, up, [dmax](double) { return dmax; });
    add(tau_d, flat, ramp);
    add(p.t_c, flat, [dmin](double) { return dmin; });
    add(tau_d, flat, [=](double t) { return ramp(tau_d - t); });
    add(tau_g, down, [dmax](double) { return dmax; });
  } else {
    add(tau_g, up, ramp);
    add(tau_d - tau_g, flat, [=](double t) { return ramp(tau_g + t); });
    add(p.t_c, flat, [dmin](double) { return dmin; });
    add(tau_d - tau_g, flat, [=](double t) { return ramp(tau_d - t); });
    add(tau_g, down, [=](double t) { return ramp(tau_g - t); });
  }
  return PulseSchedule(std::move(segs));
}

int walsh_function(int order, int m) {
  const int k = order + 1;
  if (order < 0 || (k & (k - 1)) != 0) throw DomainError("walsh function: order + 1 must be a power of two");
  if (m < 0 || m >= k) throw DomainError("walsh function: loop index out of range");
  return (std::popcount(static_cast<unsigned>(order & m)) % 2 == 0) ? 1 : -1;
}

PulseSchedule build_walsh_schedule(const WalshGateParams& p) {
  p.validate();
  const double og = p.omega_g, dg = p.delta_g;
  std::vector<Segment> segs;
  for (int m = 0; m < p.order_k; ++m) {
    const double phase = walsh_function(p.order_k - 1, m) > 0 ? 0.0 : kPi;
    segs.push_back(Segment{p.loop_time(), [og](double) { return og; }, [dg](double) { return dg; }, phase});
  }
  return PulseSchedule(std::move(segs));
}

CarrierDrive default_carrier(const PulseSchedule& s, double rabi, double phase) {
  CarrierDrive c;
  c.rabi = rabi;
  c.phase = phase;
  c.start = 0.0;
  c.stop = s.duration();
  c.inversion_time = s.duration() / 2.0;
  c.ramp_time = std::min(0.5e-6, s.duration() / 4.0);
  return c;
}

AdiabaticityProfile adiabaticity_profile(const PulseSchedule& s, std::size_t samples_per_segment) {
  if (s.segment_count() == 0) throw NumericError("adiabaticity: empty schedule");
  if (samples_per_segment < 2) throw ParameterError("adiabaticity: need at least two samples per segment");
  AdiabaticityProfile out;
  for (std::size_t i = 0; i < s.segment_count(); ++i) {
    const double a = s.segment_start(i), d = s.segment(i).duration;
    if (!(d > 0.0)) {
      throw NumericError("adiabaticity: cannot differentiate across zero-duration segment " + std::to_string(i));
    }
    auto alpha = [&](double t) { return -s.omega_in(i, t) / s.delta_in(i, t); };
    for (std::size_t k = 0; k < samples_per_segment; ++k) {
      if (i > 0 && k == 0) continue;  // shared boundary sample
      const double t = a + d * static_cast<double>(k) / static_cast<double>(samples_per_segment - 1);
      const double de = s.delta_in(i, t);
      const double h = 1e-4 * std::min(d, 2.0 * kPi / std::abs(de));
      const double am = alpha(t - h), a0 = alpha(t), ap = alpha(t + h);
      const double adot = (ap - am) / (2.0 * h);
      const double addot = (ap - 2.0 * a0 + am) / (h * h);
      const double ddot = (s.delta_in(i, t + h) - s.delta_in(i, t - h)) / (2.0 * h);
      const double bdot = addot / de - adot * ddot / (de * de);
      const double m = bdot / de;
      if (!std::isfinite(m)) throw NumericError("adiabaticity: non-finite metric");
      out.t.push_back(t);
      out.metric.push_back(m);
      if (std::abs(m) > out.peak) {
        out.peak = std::abs(m);
        out.peak_time = t;
      }
    }
  }
  return out;
}

ScheduleSamples sample_schedule(const PulseSchedule& s, std::size_t n) {
  if (n < 2) throw ParameterError("sample_schedule: need at least two samples");
  ScheduleSamples out;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = s.duration() * static_cast<double>(k) / static_cast<double>(n - 1);
    out.t.push_back(t);
    out.omega.push_back(s.omega(t));
    out.delta.push_back(s.delta(t));
    out.phase.push_back(s.drive_phase(t) + s.basis_phase());
  }
  return out;
}

}  // namespace smoothgate
