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

#include "smoothgate/filterfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "smoothgate/errors.hpp"
#include "smoothgate/quadrature.hpp"

namespace smoothgate {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

void check_omega_grid(std::span<const double> grid) {
  if (grid.empty()) throw ParameterError("filter function: empty omega grid");
  for (double w : grid) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError("filter function: omega grid must be positive");
  }
}

void assemble(FilterFunction& f, double omega, const FourierComponents& c, double nbar,
              const SpinStateVariances& v) {
  const double disp = (2.0 * nbar + 1.0) * 0.5 * (std::norm(c.alpha_cos) + std::norm(c.alpha_sin)) * v.lambda_S_sq;
  const double ang = 0.5 * (c.dtheta_cos * c.dtheta_cos + c.dtheta_sin * c.dtheta_sin) / 4.0 * v.lambda_S2_sq;
  f.omega.push_back(omega);
  f.displacement.push_back(disp);
  f.angle.push_back(ang);
  f.total.push_back(disp + ang);
}

// Closed-form Walsh integrals; alpha uses the unit displacement, b is
// int cos/sin(omega t) |gamma|^2 dt. Singular only at omega = 0 and omega = d.
struct WalshTerms {
  cd a_cos, a_sin;
  double b_cos = 0.0, b_sin = 0.0;
};

WalshTerms walsh_terms_raw(int k, double d, double om, double w) {
  WalshTerms r;
  const double tg = 2.0 * kPi * k / d;
  if (w == 0.0) {
    double wsum = 0.0;
    for (int m = 0; m < k; ++m) wsum += walsh_function(k - 1, m);
    r.a_cos = -om * kPi / (d * d) * wsum;
    r.b_cos = om * om * tg / (2.0 * d * d);
    return r;
  }
  const double pre = om * std::sin(kPi * w / d) / (w * (w * w - d * d));
  for (int m = 0; m < k; ++m) {
    const double x = (2 * m + 1) * kPi * w / d;
    const double wm = walsh_function(k - 1, m);
    r.a_cos += wm * pre * cd(d * std::cos(x), w * std::sin(x));
    r.a_sin += wm * pre * cd(d * std::sin(x), -w * std::cos(x));
  }
  const double s = std::sin(0.5 * w * tg);
  r.b_cos = om * om * std::sin(w * tg) / (2.0 * w * (d * d - w * w));
  r.b_sin = om * om * s * s / (w * (d * d - w * w));
  return r;
}

WalshTerms walsh_terms(int k, double d, double om, double w) {
  const double eps = 1e-6 * d;
  if (std::abs(w - d) >= eps) return walsh_terms_raw(k, d, om, w);
  // Removable singularity: symmetric average about the pole.
  const double h = std::max(eps, std::abs(w - d));
  const WalshTerms lo = walsh_terms_raw(k, d, om, d - h), hi = walsh_terms_raw(k, d, om, d + h);
  WalshTerms r;
  r.a_cos = 0.5 * (lo.a_cos + hi.a_cos);
  r.a_sin = 0.5 * (lo.a_sin + hi.a_sin);
  r.b_cos = 0.5 * (lo.b_cos + hi.b_cos);
  r.b_sin = 0.5 * (lo.b_sin + hi.b_sin);
  return r;
}

}  // namespace

std::vector<double> default_omega_grid(double lo, double hi, std::size_t n, std::span<const double> dense_near) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ParameterError("omega grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g;
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t k = 0; k < n; ++k) g.push_back(std::exp(llo + (lhi - llo) * static_cast<double>(k) / (n - 1)));
  for (double c : dense_near) {
    c = std::abs(c);
    if (c <= lo || c >= hi) continue;
    const double a = std::log(std::max(lo, c / 1.3)), b = std::log(std::min(hi, c * 1.3));
    for (int k = 0; k < 40; ++k) g.push_back(std::exp(a + (b - a) * k / 39.0));
  }
  g.front() = lo;
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

FourierComponents fourier_components(const BranchTrajectory& traj, double omega) {
  const std::size_t n = traj.t.size();
  FourierComponents c;
  if (traj.eigenvalue == 0.0 || n < 2) return c;
  double max_dt = 0.0;
  for (std::size_t k = 1; k < n; ++k) max_dt = std::max(max_dt, traj.t[k] - traj.t[k - 1]);
  if (max_dt * omega > 2.0 * kPi / 10.0) {
    throw GridResolutionError("filter function: trajectory grid has fewer than 10 samples per noise period");
  }
  std::vector<cd> gc(n), gs(n);
  std::vector<double> ac(n), as(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cd g = traj.gamma[k] / traj.eigenvalue;
    const double co = std::cos(omega * traj.t[k]), si = std::sin(omega * traj.t[k]);
    gc[k] = co * g;
    gs[k] = si * g;
    ac[k] = co * std::norm(g);
    as[k] = si * std::norm(g);
  }
  std::vector<std::size_t> pieces = traj.piece_starts;
  if (pieces.empty()) pieces = {0, n - 1};
  c.alpha_cos = integrate_pieces(traj.t, gc, pieces);
  c.alpha_sin = integrate_pieces(traj.t, gs, pieces);
  c.dtheta_cos = 2.0 * integrate_pieces(traj.t, ac, pieces);
  c.dtheta_sin = 2.0 * integrate_pieces(traj.t, as, pieces);
  return c;
}

double filter_value_at_phase(const BranchTrajectory& traj, double omega, double phi, double nbar,
                             const SpinStateVariances& vars) {
  const FourierComponents c = fourier_components(traj, omega);
  // cos(wt + phi) = cos(phi) cos(wt) - sin(phi) sin(wt)
  const cd a = std::cos(phi) * c.alpha_cos - std::sin(phi) * c.alpha_sin;
  const double d = std::cos(phi) * c.dtheta_cos - std::sin(phi) * c.dtheta_sin;
  return (2.0 * nbar + 1.0) * std::norm(a) * vars.lambda_S_sq + d * d / 4.0 * vars.lambda_S2_sq;
}

FilterFunction filter_function_from_trajectory(const BranchTrajectory& traj, double nbar,
                                               const SpinStateVariances& vars, std::span<const double> omega_grid) {
  check_omega_grid(omega_grid);
  if (!(nbar >= 0.0)) throw ParameterError("filter function: nbar must be non-negative");
  FilterFunction f;
  f.nbar = nbar;
  for (double w : omega_grid) assemble(f, w, fourier_components(traj, w), nbar, vars);
  return f;
}

FilterFunction filter_function_numeric(const PulseSchedule& s, double nbar, const SpinStateVariances& vars,
                                       std::span<const double> omega_grid) {
  check_omega_grid(omega_grid);
  const double wmax = *std::max_element(omega_grid.begin(), omega_grid.end());
  const BranchTrajectory traj = propagate_displacement(s, 1.0, make_time_grid(s, 64.0, wmax, 16.0));
  return filter_function_from_trajectory(traj, nbar, vars, omega_grid);
}

FilterFunction filter_function_walsh_analytic(const WalshGateParams& p, double nbar, const SpinStateVariances& vars,
                                              std::span<const double> omega_grid) {
  p.validate();
  if (!(nbar >= 0.0)) throw ParameterError("filter function: nbar must be non-negative");
  FilterFunction f;
  f.nbar = nbar;
  const double d = std::abs(p.delta_g);
  for (double w : omega_grid) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("filter function: omega grid must be non-negative");
    const WalshTerms t = walsh_terms(p.order_k, d, p.omega_g, w);
    FourierComponents c{t.a_cos, t.a_sin, 2.0 * t.b_cos, 2.0 * t.b_sin};
    assemble(f, w, c, nbar, vars);
  }
  return f;
}

void validate_psd(const NoisePsd& p) {
  if (const auto* pl = std::get_if<PowerLawPsd>(&p)) {
    if (!(pl->amplitude >= 0.0) || !std::isfinite(pl->exponent)) throw ParameterError("psd: invalid power law");
    if (!(pl->omega_high > pl->omega_low)) throw ParameterError("psd: empty power-law band");
    if (pl->omega_low <= 0.0 && pl->exponent >= 1.0) {
      throw ParameterError("psd: power law diverges at omega -> 0 without a lower cutoff");
    }
  } else {
    const auto& sp = std::get<SampledPsd>(p);
    if (sp.omega.size() != sp.power.size() || sp.omega.size() < 2) throw ParameterError("psd: malformed samples");
    for (std::size_t k = 0; k < sp.omega.size(); ++k) {
      if (!(sp.power[k] >= 0.0) || !std::isfinite(sp.power[k])) throw ParameterError("psd: negative power");
      if (k > 0 && !(sp.omega[k] > sp.omega[k - 1])) throw ParameterError("psd: omega not increasing");
    }
  }
}

double psd_value(const NoisePsd& p, double omega) {
  if (const auto* pl = std::get_if<PowerLawPsd>(&p)) {
    if (omega < pl->omega_low || omega > pl->omega_high || omega <= 0.0) return 0.0;
    return pl->amplitude * std::pow(omega, -pl->exponent);
  }
  const auto& sp = std::get<SampledPsd>(p);
  if (omega < sp.omega.front() || omega > sp.omega.back()) return 0.0;
  const auto it = std::upper_bound(sp.omega.begin(), sp.omega.end(), omega);
  if (it == sp.omega.end()) return sp.power.back();
  const std::size_t i = static_cast<std::size_t>(it - sp.omega.begin());
  const double w = (omega - sp.omega[i - 1]) / (sp.omega[i] - sp.omega[i - 1]);
  return (1.0 - w) * sp.power[i - 1] + w * sp.power[i];
}

NoiseIntegral noise_infidelity_integral(const FilterFunction& f, const NoisePsd& p) {
  validate_psd(p);
  if (f.omega.size() < 2) throw ParameterError("noise integral: filter function needs at least two samples");
  double plo, phi;
  std::vector<double> grid(f.omega.begin(), f.omega.end());
  if (const auto* pl = std::get_if<PowerLawPsd>(&p)) {
    plo = pl->omega_low;
    phi = pl->omega_high;
    grid.push_back(plo);
    grid.push_back(phi);
  } else {
    const auto& sp = std::get<SampledPsd>(p);
    plo = sp.omega.front();
    phi = sp.omega.back();
    grid.insert(grid.end(), sp.omega.begin(), sp.omega.end());
  }
  const double lo = std::max(plo, f.omega.front()), hi = std::min(phi, f.omega.back());
  if (!(hi > lo)) throw ParameterError("noise integral: filter function and PSD supports do not overlap");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::remove_if(grid.begin(), grid.end(), [&](double w) { return w < lo || w > hi; }), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto filter_at = [&](double w) {
    const auto it = std::upper_bound(f.omega.begin(), f.omega.end(), w);
    if (it == f.omega.end()) return f.total.back();
    if (it == f.omega.begin()) return f.total.front();
    const std::size_t i = static_cast<std::size_t>(it - f.omega.begin());
    const double u = (w - f.omega[i - 1]) / (f.omega[i] - f.omega[i - 1]);
    return (1.0 - u) * f.total[i - 1] + u * f.total[i];
  };
  std::vector<double> y(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) y[k] = psd_value(p, grid[k]) * filter_at(grid[k]);

  auto trapezoid = [&](std::size_t stride) {
    double acc = 0.0;
    std::size_t prev = 0;
    for (std::size_t k = stride; ; k += stride) {
      const std::size_t cur = std::min(k, grid.size() - 1);
      acc += 0.5 * (grid[cur] - grid[prev]) * (y[cur] + y[prev]);
      prev = cur;
      if (cur == grid.size() - 1) break;
    }
    return acc;
  };
  NoiseIntegral out;
  out.value = trapezoid(1);
  out.error_estimate = grid.size() > 2 ? std::abs(out.value - trapezoid(2)) / 3.0 : 0.0;
  return out;
}

}  // namespace smoothgate
