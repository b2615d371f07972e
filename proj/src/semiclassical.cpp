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

#include "smoothgate/semiclassical.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "smoothgate/errors.hpp"
#include "smoothgate/quadrature.hpp"

namespace smoothgate {

namespace {

namespace odeint = boost::numeric::odeint;
using cd = std::complex<double>;
using State = std::array<double, 4>;  // re gamma, im gamma, eta - eta0, theta - theta0
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct BranchRhs {
  const PulseSchedule* s;
  std::size_t seg;
  double eig;
  double eta0;
  double phi;

  void operator()(const State& x, State& dx, double t) const {
    const double om = s->omega_in(seg, t);
    const double chi = eta0 + x[2] + phi;
    const double gr = 0.5 * eig * om * std::sin(chi);
    const double gi = -0.5 * eig * om * std::cos(chi);
    dx[0] = gr;
    dx[1] = gi;
    dx[2] = s->delta_in(seg, t);
    dx[3] = x[0] * gi - x[1] * gr;
  }
};

State rk4_interval(const BranchRhs& f, State x, double t0, double t1, int n) {
  const double h = (t1 - t0) / n;
  State k1, k2, k3, k4, y;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    f(x, k1, t);
    for (int c = 0; c < 4; ++c) y[c] = x[c] + 0.5 * h * k1[c];
    f(y, k2, t + 0.5 * h);
    for (int c = 0; c < 4; ++c) y[c] = x[c] + 0.5 * h * k2[c];
    f(y, k3, t + 0.5 * h);
    for (int c = 0; c < 4; ++c) y[c] = x[c] + h * k3[c];
    f(y, k4, t + h);
    for (int c = 0; c < 4; ++c) x[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
  }
  return x;
}

State fixed_step_interval(const BranchRhs& f, const State& x, double t0, double t1, const IntegratorOptions& opt) {
  const State coarse = rk4_interval(f, x, t0, t1, opt.fixed_substeps);
  const State fine = rk4_interval(f, x, t0, t1, 2 * opt.fixed_substeps);
  const double scale = 1.0 + std::hypot(fine[0], fine[1]) + std::abs(fine[3]);
  double diff = 0.0;
  for (int c : {0, 1, 3}) diff = std::max(diff, std::abs(fine[c] - coarse[c]));
  if (diff > opt.refinement_tol * scale) {
    throw ConvergenceError("propagate_displacement: fixed-step refinement disagrees by " + std::to_string(diff));
  }
  return fine;
}

std::vector<std::size_t> locate_breakpoints(const PulseSchedule& s, std::span<const double> t) {
  const double tol = 1e-12 * std::max(1.0, s.duration());
  std::vector<std::size_t> idx;
  std::size_t k = 0;
  for (double b : s.breakpoints()) {
    while (k < t.size() && t[k] < b - tol) ++k;
    if (k == t.size() || std::abs(t[k] - b) > tol) {
      throw GridResolutionError("propagate_displacement: grid misses schedule breakpoint at t = " + std::to_string(b));
    }
    if (idx.empty() || idx.back() != k) idx.push_back(k);
  }
  return idx;
}

}  // namespace

TimeGrid make_time_grid(const PulseSchedule& s, double points_per_period, double omega_max, double omega_points) {
  const std::vector<double> bp = s.breakpoints();
  std::vector<std::size_t> seg(bp.size());
  for (std::size_t p = 0; p + 1 < bp.size(); ++p) seg[p] = s.segment_at(0.5 * (bp[p] + bp[p + 1]));
  const double floor_rate = omega_max > 0.0 ? omega_max * omega_points / points_per_period : 0.0;
  auto rate = [&](std::size_t p, double t) { return std::max(std::abs(s.delta_in(seg[p], t)), floor_rate); };
  AdaptedGrid g = adapted_grid(bp, rate, points_per_period, 32);
  return TimeGrid{std::move(g.t), std::move(g.piece_starts)};
}

BranchTrajectory propagate_displacement(const PulseSchedule& s, double branch_eigenvalue, const TimeGrid& grid,
                                        const IntegratorOptions& opt) {
  const std::vector<double>& t = grid.t;
  if (s.segment_count() == 0) throw ParameterError("propagate_displacement: empty schedule");
  if (!std::isfinite(branch_eigenvalue)) throw ParameterError("propagate_displacement: non-finite eigenvalue");
  if (t.size() < 2 || t.front() != 0.0) throw GridResolutionError("propagate_displacement: grid must start at 0");
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1])) throw GridResolutionError("propagate_displacement: grid not strictly increasing");
  }
  const std::vector<std::size_t> pieces = locate_breakpoints(s, t);
  if (pieces.back() != t.size() - 1) throw GridResolutionError("propagate_displacement: grid must end at t_g");

  BranchTrajectory out;
  out.t = t;
  out.piece_starts = pieces;
  out.eigenvalue = branch_eigenvalue;
  out.gamma.assign(t.size(), cd(0.0, 0.0));
  out.eta.assign(t.size(), 0.0);
  out.theta.assign(t.size(), 0.0);

  auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<State>());
  State x{0.0, 0.0, 0.0, 0.0};
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double t0 = t[k], t1 = t[k + 1];
    const std::size_t seg = s.segment_at(0.5 * (t0 + t1));
    const double rate = std::max(std::abs(s.delta_in(seg, t0)), std::abs(s.delta_in(seg, t1)));
    if ((t1 - t0) * rate > kTwoPi / 20.0) {
      throw GridResolutionError("propagate_displacement: grid spacing exceeds 1/20 of the detuning period at t = " +
                                std::to_string(t0));
    }
    BranchRhs f{&s, seg, branch_eigenvalue, out.eta[k], s.drive_phase_in(seg)};
    x[2] = 0.0;
    x[3] = 0.0;
    bool done = false;
    if (!opt.force_fixed_step) {
      try {
        State y = x;
        stepper.reset();  // cached FSAL derivative is stale across segments
        odeint::integrate_adaptive(stepper, f, y, t0, t1, 0.25 * (t1 - t0));
        if (std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
          x = y;
          done = true;
        }
      } catch (const std::exception&) {
        done = false;
      }
    }
    if (!done) x = fixed_step_interval(f, x, t0, t1, opt);
    out.gamma[k + 1] = cd(x[0], x[1]);
    out.eta[k + 1] = out.eta[k] + x[2];
    out.theta[k + 1] = out.theta[k] + x[3];
  }
  return out;
}

BranchTrajectory propagate_displacement(const PulseSchedule& s, double branch_eigenvalue) {
  return propagate_displacement(s, branch_eigenvalue, make_time_grid(s));
}

double gate_angle_numeric(const PulseSchedule& s) { return 4.0 * propagate_displacement(s, 1.0).final_theta(); }

AdiabaticAngle gate_angle_adiabatic(const PulseSchedule& s, double metric_threshold) {
  using boost::math::quadrature::gauss_kronrod;
  AdiabaticAngle out;
  for (std::size_t i = 0; i < s.segment_count(); ++i) {
    const double a = s.segment_start(i), b = s.segment_end(i);
    if (!(b > a)) continue;
    auto alpha = [&](double t) { return s.omega_in(i, t) / s.delta_in(i, t); };
    auto full = [&](double t) {
      const double de = s.delta_in(i, t);
      const double h = 1e-5 * std::min(b - a, kTwoPi / std::abs(de));
      const double adot = (alpha(t + h) - alpha(t - h)) / (2.0 * h);
      const double om = s.omega_in(i, t);
      return (om * om + adot * adot) / de;
    };
    auto leading = [&](double t) {
      const double om = s.omega_in(i, t);
      return om * om / s.delta_in(i, t);
    };
    out.full += gauss_kronrod<double, 61>::integrate(full, a, b, 12, 1e-12);
    out.leading += gauss_kronrod<double, 61>::integrate(leading, a, b, 12, 1e-12);
  }
  out.peak_metric = adiabaticity_profile(s).peak;
  out.trusted = out.peak_metric < metric_threshold;
  return out;
}

namespace {

SmoothGateParams rescale_omega(SmoothGateParams p, double angle, double target) {
  if (!(angle != 0.0) || (angle < 0) != (target < 0)) {
    throw ParameterError("calibrate: target angle sign does not match the detuning sign");
  }
  p.omega_g *= std::sqrt(target / angle);
  p.validate();
  return p;
}

}  // namespace

SmoothGateParams calibrate_omega_adiabatic(const SmoothGateParams& p, double target) {
  return rescale_omega(p, gate_angle_adiabatic(build_smooth_schedule(p)).full, target);
}

SmoothGateParams calibrate_omega_numeric(const SmoothGateParams& p, double target) {
  return rescale_omega(p, gate_angle_numeric(build_smooth_schedule(p)), target);
}

PerturbativeInfidelity perturbative_infidelity(const BranchTrajectory& traj, std::span<const double> eps,
                                               const SpinStateVariances& vars, double nbar) {
  if (eps.size() != traj.t.size()) throw ParameterError("perturbative_infidelity: eps and trajectory grids differ");
  if (!(nbar >= 0.0)) throw ParameterError("perturbative_infidelity: nbar must be non-negative");
  PerturbativeInfidelity out;
  out.nbar = nbar;
  if (traj.eigenvalue == 0.0) return out;
  const std::size_t n = traj.t.size();
  std::vector<cd> fg(n);
  std::vector<double> fa(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cd g = traj.gamma[k] / traj.eigenvalue;
    fg[k] = eps[k] * g;
    fa[k] = eps[k] * std::norm(g);
  }
  std::vector<std::size_t> pieces = traj.piece_starts;
  if (pieces.empty()) pieces = {0, n - 1};
  out.residual_displacement = integrate_pieces(traj.t, fg, pieces);
  out.angle_error = 2.0 * integrate_pieces(traj.t, fa, pieces);
  out.total = (2.0 * nbar + 1.0) * std::norm(out.residual_displacement) * vars.lambda_S_sq +
              out.angle_error * out.angle_error / 4.0 * vars.lambda_S2_sq;
  return out;
}

PerturbativeInfidelity perturbative_infidelity(const BranchTrajectory& traj, const std::function<double(double)>& eps,
                                               const SpinStateVariances& vars, double nbar) {
  std::vector<double> e(traj.t.size());
  std::transform(traj.t.begin(), traj.t.end(), e.begin(), eps);
  return perturbative_infidelity(traj, e, vars, nbar);
}

BranchTrajectory to_rotating_frame(const BranchTrajectory& traj) {
  BranchTrajectory out = traj;
  for (std::size_t k = 0; k < out.t.size(); ++k) out.gamma[k] = traj.gamma[k] * std::polar(1.0, -traj.eta[k]);
  out.frame_mapped = true;
  return out;
}

}  // namespace smoothgate
