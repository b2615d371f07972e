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

#include "smoothgate/quantum.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <boost/math/special_functions/laguerre.hpp>
#include <cmath>
#include <numbers>
#include <cstdio>
#include <string>

#include "smoothgate/errors.hpp"
#include "smoothgate/parallel.hpp"
#include "smoothgate/quadrature.hpp"

namespace smoothgate {

namespace {

using cd = std::complex<double>;
using Sparse = Eigen::SparseMatrix<cd>;
constexpr double kPi = std::numbers::pi;
const cd kI(0.0, 1.0);

Sparse kron(const SpinMatrix& spin, const Sparse& motion) {
  const int m = static_cast<int>(motion.rows());
  std::vector<Eigen::Triplet<cd>> trip;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (spin(a, b) == cd(0.0)) continue;
      for (int k = 0; k < motion.outerSize(); ++k)
        for (Sparse::InnerIterator it(motion, k); it; ++it)
          trip.emplace_back(a * m + static_cast<int>(it.row()), b * m + static_cast<int>(it.col()),
                            spin(a, b) * it.value());
    }
  Sparse out(4 * m, 4 * m);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Sparse lowering(int n_max) {
  Sparse a(n_max + 1, n_max + 1);
  std::vector<Eigen::Triplet<cd>> trip;
  for (int n = 1; n <= n_max; ++n) trip.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

Sparse identity(int n) {
  Sparse id(n, n);
  id.setIdentity();
  return id;
}

double norm1(const Sparse& m) {
  double best = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    double col = 0.0;
    for (Sparse::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

// exp(M) V by scaled Taylor series.
void apply_exponential(const Sparse& m, Eigen::MatrixXcd& v, double tol) {
  const double mu = norm1(m);
  const int substeps = std::max(1, static_cast<int>(std::ceil(mu / 0.5)));
  const double scale = 1.0 / substeps;
  Eigen::MatrixXcd term, next;
  for (int s = 0; s < substeps; ++s) {
    term = v;
    for (int k = 1; k <= 60; ++k) {
      next = (m * term) * (scale / k);
      term.swap(next);
      v += term;
      if (term.norm() <= tol * v.norm()) break;
      if (k == 60) throw NumericError("propagate: Taylor series did not converge");
    }
  }
}

struct Operators {
  Sparse p, q, c, pq, pc, qc;
  bool carrier = false;
};

Operators build_operators(const PulseSchedule& s, int n_max) {
  const Sparse a = lowering(n_max);
  const Sparse ad = Sparse(a.adjoint());
  const SpinMatrix sp = collective_spin(s.basis_phase());
  Operators op;
  op.p = kron(sp, ad);
  op.q = kron(sp, a);
  op.pq = Sparse(op.p * op.q) - Sparse(op.q * op.p);
  if (s.has_carrier()) {
    op.carrier = true;
    op.c = kron(collective_spin(s.carrier()->phase), identity(n_max + 1));
    op.pc = Sparse(op.p * op.c) - Sparse(op.c * op.p);
    op.qc = Sparse(op.q * op.c) - Sparse(op.c * op.q);
  }
  return op;
}

double max_edge_population(const Eigen::MatrixXcd& v, int n_max, const Eigen::VectorXd& col_norm2) {
  double worst = 0.0;
  for (int c = 0; c < v.cols(); ++c) {
    double p = 0.0;
    for (int sp = 0; sp < 4; ++sp) p += std::norm(v(CompositeState::index(sp, n_max, n_max), c));
    if (col_norm2(c) > 0.0) worst = std::max(worst, p / col_norm2(c));
  }
  return worst;
}

}  // namespace

void FockConfig::validate() const {
  if (n_max < 1) throw ParameterError("fock: n_max must be at least 1");
  if (!(convergence_margin > 0.0)) throw ParameterError("fock: convergence margin must be positive");
}

CompositeState::CompositeState(int n_max) : amp_(Eigen::VectorXcd::Zero(4 * (n_max + 1))), n_max_(n_max) {
  if (n_max < 1) throw ParameterError("composite state: n_max must be at least 1");
}

CompositeState::CompositeState(Eigen::VectorXcd amplitudes, int n_max) : amp_(std::move(amplitudes)), n_max_(n_max) {
  if (n_max < 1 || amp_.size() != 4 * (n_max + 1)) throw ParameterError("composite state: dimension mismatch");
}

CompositeState CompositeState::product(const SpinVector& spin, int n, int n_max) {
  if (n < 0 || n > n_max) throw ParameterError("composite state: Fock index out of range");
  CompositeState st(n_max);
  for (int sp = 0; sp < 4; ++sp) st.amp_(index(sp, n, n_max)) = spin(sp);
  return st;
}

SpinMatrix CompositeState::reduced_spin() const {
  SpinMatrix rho = SpinMatrix::Zero();
  const int m = n_max_ + 1;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) rho(a, b) = amp_.segment(a * m, m).dot(amp_.segment(b * m, m));
  // dot() conjugates its left operand: rho(a,b) = sum_n conj(psi_a,n) psi_b,n
  return rho.transpose().eval();
}

double CompositeState::fock_population(int n) const {
  double p = 0.0;
  for (int sp = 0; sp < 4; ++sp) p += std::norm(amp_(index(sp, n, n_max_)));
  return p;
}

cd CompositeState::conditional_mean_a(const SpinVector& v) const {
  const int m = n_max_ + 1;
  Eigen::VectorXcd mot = Eigen::VectorXcd::Zero(m);
  for (int sp = 0; sp < 4; ++sp) mot += std::conj(v(sp)) * amp_.segment(sp * m, m);
  const double w = mot.squaredNorm();
  if (w == 0.0) return 0.0;
  cd acc = 0.0;
  for (int n = 1; n < m; ++n) acc += std::conj(mot(n - 1)) * std::sqrt(static_cast<double>(n)) * mot(n);
  return acc / w;
}

Eigen::MatrixXcd propagate_columns(const PulseSchedule& s, const Eigen::MatrixXcd& columns, int n_max,
                                   const PropagatorOptions& opt) {
  if (s.segment_count() == 0) throw ParameterError("propagate: empty schedule");
  if (columns.rows() != 4 * (n_max + 1)) throw ParameterError("propagate: state dimension mismatch");
  const Operators op = build_operators(s, n_max);
  const std::vector<double> bp = s.breakpoints();
  std::vector<std::size_t> seg(bp.size());
  std::vector<double> csign(bp.size(), 1.0);
  for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
    const double mid = 0.5 * (bp[p] + bp[p + 1]);
    seg[p] = s.segment_at(mid);
    if (op.carrier) csign[p] = s.carrier()->phase_at(mid) == s.carrier()->phase ? 1.0 : -1.0;
  }
  auto rate = [&](std::size_t p, double t) {
    double r = std::max(std::abs(s.delta_in(seg[p], t)), std::abs(s.omega_in(seg[p], t)));
    if (op.carrier) r = std::max(r, std::abs(s.carrier()->rabi_at(t)));
    return r;
  };
  const AdaptedGrid grid = adapted_grid(bp, rate, opt.points_per_period, 4);

  Eigen::MatrixXcd v = columns;
  Eigen::VectorXd norm2 = v.colwise().squaredNorm().transpose();
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
  double eta = 0.0;
  std::size_t piece = 0;
  for (std::size_t k = 0; k + 1 < grid.t.size(); ++k) {
    while (piece + 1 < grid.piece_starts.size() && grid.piece_starts[piece + 1] <= k) ++piece;
    const std::size_t sg = seg[piece];
    const double t0 = grid.t[k], h = grid.t[k + 1] - grid.t[k];
    auto delta = [&](double t) { return s.delta_in(sg, t); };
    auto coeffs = [&](double c, cd& a, cd& b, cd& cc) {
      const double t = t0 + c * h;
      const double chi = eta + gauss_legendre5(delta, t0, t) + s.drive_phase_in(sg);
      const double om = 0.5 * s.omega_in(sg, t);
      a = om * std::polar(1.0, chi);
      b = om * std::polar(1.0, -chi);
      cc = op.carrier ? 0.5 * csign[piece] * s.carrier()->rabi_at(t) : 0.0;
    };
    // The sideband terms close at second order, so their Magnus terms are
    // integrated with nested Gauss-Legendre rules instead of the 2-point rule.
    cd a_int = 0.0, pq_int = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double c = 0.5 * (1.0 + kGl5x[i]);
      cd ai, bi, ki, inner = 0.0;
      coeffs(c, ai, bi, ki);
      a_int += 0.5 * h * kGl5w[i] * ai;
      for (int j = 0; j < 5; ++j) {
        cd aj, bj, kj;
        coeffs(c * 0.5 * (1.0 + kGl5x[j]), aj, bj, kj);
        inner += 0.5 * c * h * kGl5w[j] * aj;
      }
      pq_int += 0.5 * h * kGl5w[i] * (ai * std::conj(inner) - bi * inner);
    }
    Sparse m = (-kI * a_int) * op.p + (-kI * std::conj(a_int)) * op.q + (-0.5 * pq_int) * op.pq;
    if (op.carrier) {
      cd a1, b1, k1, a2, b2, k2;
      coeffs(c1, a1, b1, k1);
      coeffs(c2, a2, b2, k2);
      const double w = std::sqrt(3.0) * h * h / 12.0;
      m += (-kI * 0.5 * h * (k1 + k2)) * op.c + (-w * (a2 * k1 - k2 * a1)) * op.pc + (-w * (b2 * k1 - k2 * b1)) * op.qc;
    }
    apply_exponential(m, v, opt.taylor_tolerance);
    eta += gauss_legendre5(delta, t0, t0 + h);
    const double edge = max_edge_population(v, n_max, norm2);
    if (edge > opt.truncation_tolerance) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "propagate: population %.3g at n_max = %d (t = %.6g s); raise n_max", edge,
                    n_max, t0 + h);
      throw TruncationError(msg);
    }
  }
  const Eigen::VectorXd final_norm2 = v.colwise().squaredNorm().transpose();
  for (int c = 0; c < v.cols(); ++c) {
    if (std::abs(std::sqrt(final_norm2(c)) - std::sqrt(norm2(c))) > opt.norm_tolerance * std::max(1.0, std::sqrt(norm2(c)))) {
      throw NumericError("propagate: norm drift exceeds tolerance; step size too large");
    }
  }
  for (int sp = 0; sp < 4; ++sp)
    for (int n = 0; n <= n_max; ++n) v.row(CompositeState::index(sp, n, n_max)) *= std::polar(1.0, -eta * n);
  return v;
}

CompositeState propagate(const PulseSchedule& s, const CompositeState& psi0, const FockConfig& fock,
                         const PropagatorOptions& opt) {
  fock.validate();
  if (fock.n_max != psi0.n_max()) throw ParameterError("propagate: Fock cutoff differs from the state's");
  const Eigen::MatrixXcd out = propagate_columns(s, psi0.amplitudes(), fock.n_max, opt);
  return CompositeState(out.col(0), fock.n_max);
}

namespace {

// <m| D(beta) |n0> for m = 0..n_max.
Eigen::VectorXcd displaced_fock(cd beta, int n0, int n_max) {
  Eigen::VectorXcd out(n_max + 1);
  const double x = std::norm(beta);
  const double env = std::exp(-0.5 * x);
  for (int m = 0; m <= n_max; ++m) {
    const int lo = std::min(m, n0), hi = std::max(m, n0), d = hi - lo;
    const cd base = m >= n0 ? beta : -std::conj(beta);
    cd pw = 1.0;
    for (int k = 0; k < d; ++k) pw *= base;
    const double ratio = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)));
    out(m) = ratio * pw * env * boost::math::laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(d), x);
  }
  return out;
}

BranchTrajectory unit_branch(const PulseSchedule& s) {
  if (s.has_carrier()) {
    throw ParameterError("branch factorization: carrier drive does not commute with the collective spin");
  }
  IntegratorOptions io;
  io.abs_tol = 1e-15;
  io.rel_tol = 1e-13;
  return propagate_displacement(s, 1.0, make_time_grid(s, 64.0), io);
}

BranchState branch_from_unit(const BranchTrajectory& unit, double eigenvalue, int n0, int n_max) {
  if (n0 < 0 || n0 > n_max) throw ParameterError("branch factorization: Fock index out of range");
  BranchState b;
  b.eigenvalue = eigenvalue;
  b.n0 = n0;
  b.displacement = eigenvalue * unit.final_gamma();
  b.phase = eigenvalue * eigenvalue * unit.final_theta();
  b.fock = displaced_fock(b.displacement, n0, n_max);
  const double eta = unit.final_eta();
  for (int m = 0; m <= n_max; ++m) b.fock(m) *= std::polar(1.0, -eta * m);
  return b;
}

}  // namespace

BranchState branch_factorized_propagate(const PulseSchedule& s, double eigenvalue, int n0, int n_max) {
  return branch_from_unit(unit_branch(s), eigenvalue, n0, n_max);
}

CompositeState branch_factorized_state(const PulseSchedule& s, const SpinVector& psi0, int n0, int n_max) {
  const BranchTrajectory unit = unit_branch(s);
  const SpinEigenbasis eb = collective_eigenbasis(s.basis_phase());
  CompositeState out(n_max);
  const int m = n_max + 1;
  for (int k = 0; k < 4; ++k) {
    const cd c = eb.vector[k].dot(psi0);
    if (c == cd(0.0)) continue;
    const BranchState b = branch_from_unit(unit, eb.eigenvalue[k], n0, n_max);
    const cd w = c * std::polar(1.0, b.phase);
    for (int sp = 0; sp < 4; ++sp) out.amplitudes().segment(sp * m, m) += w * eb.vector[k](sp) * b.fock;
  }
  return out;
}

ThermalEnsemble ThermalEnsemble::truncated(double nbar, double tail_tolerance) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw ParameterError("thermal ensemble: nbar must be non-negative");
  if (nbar == 0.0) return with_cutoff(0.0, 0);
  const double q = nbar / (nbar + 1.0);
  // tail above n_top is q^(n_top + 1)
  const int n_top = std::max(0, static_cast<int>(std::floor(std::log(tail_tolerance) / std::log(q))));
  return with_cutoff(nbar, n_top);
}

ThermalEnsemble ThermalEnsemble::with_cutoff(double nbar, int n_top) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw ParameterError("thermal ensemble: nbar must be non-negative");
  if (n_top < 0) throw ParameterError("thermal ensemble: negative cutoff");
  ThermalEnsemble e;
  e.nbar = nbar;
  e.weights.resize(n_top + 1);
  const double q = nbar / (nbar + 1.0);
  double sum = 0.0;
  for (int n = 0; n <= n_top; ++n) {
    e.weights[n] = std::pow(q, n) / (nbar + 1.0);
    sum += e.weights[n];
  }
  e.tail_mass = nbar == 0.0 ? 0.0 : std::pow(q, n_top + 1);
  for (double& w : e.weights) w /= sum;
  return e;
}

GateOutcome outcome_from_spin(const SpinMatrix& rho, const SpinVector& psi0, double target_angle, double basis_phase) {
  GateOutcome g;
  g.p_upup = rho(kUpUp, kUpUp).real();
  g.p_downdown = rho(kDownDown, kDownDown).real();
  g.p_odd = rho(kUpDown, kUpDown).real() + rho(kDownUp, kDownUp).real();
  const SpinVector target = ideal_gate(target_angle, basis_phase) * psi0;
  g.fidelity = std::clamp(target.dot(rho * target).real(), 0.0, 1.0);
  g.spin_purity = (rho * rho).trace().real();
  const cd coh = rho(kDownDown, kUpUp) * std::polar(1.0, -2.0 * basis_phase);
  g.gate_angle = std::atan2(2.0 * coh.imag(), g.p_upup - g.p_downdown);
  g.target_angle = target_angle;
  return g;
}

FockConfig default_fock_config(const PulseSchedule& s, const ThermalEnsemble& ens) {
  double beta = 0.0;
  for (const cd& g : propagate_displacement(s, 2.0).gamma) beta = std::max(beta, std::abs(g));
  const double base = std::max<double>(ens.n_top(), std::ceil(ens.nbar + 10.0 * std::sqrt(ens.nbar + 1.0)));
  FockConfig f;
  f.n_max = static_cast<int>(base + std::ceil(4.0 * beta * (std::sqrt(base + 1.0) + beta)) + 6);
  return f;
}

GateOutcome thermal_average(const PulseSchedule& s, const ThermalEnsemble& ens, const SpinVector& psi0,
                            double target_angle, std::optional<FockConfig> fock, const PropagatorOptions& opt) {
  if (ens.tail_mass >= 1e-6) throw ParameterError("thermal average: ensemble tail mass is not below 1e-6");
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw ParameterError("thermal average: spin state is not normalized");
  const FockConfig fc = fock ? *fock : default_fock_config(s, ens);
  fc.validate();
  if (fc.n_max <= ens.n_top()) throw ParameterError("thermal average: n_max does not cover the ensemble");

  const int ncol = ens.n_top() + 1;
  const int dim = 4 * (fc.n_max + 1);
  const int chunks = std::min(ncol, thread_count());
  std::vector<Eigen::MatrixXcd> results(chunks);
  auto range = [&](int c) { return std::pair<int, int>{c * ncol / chunks, (c + 1) * ncol / chunks}; };
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const auto [lo, hi] = range(static_cast<int>(c));
    Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(dim, hi - lo);
    for (int n = lo; n < hi; ++n) cols.col(n - lo) = CompositeState::product(psi0, n, fc.n_max).amplitudes();
    results[c] = propagate_columns(s, cols, fc.n_max, opt);
  });

  const SpinEigenbasis eb = collective_eigenbasis(s.basis_phase());
  const SpinVector forced = std::abs(eb.vector[0].dot(psi0)) > 1e-12 ? eb.vector[0] : eb.vector[1];
  SpinMatrix rho = SpinMatrix::Zero();
  double disp = 0.0;
  for (int c = 0; c < chunks; ++c) {
    const auto [lo, hi] = range(c);
    for (int n = lo; n < hi; ++n) {
      const CompositeState st(results[c].col(n - lo), fc.n_max);
      rho += ens.weights[n] * st.reduced_spin();
      disp += ens.weights[n] * std::abs(st.conditional_mean_a(forced));
    }
  }
  GateOutcome g = outcome_from_spin(rho, psi0, target_angle, s.basis_phase());
  g.residual_displacement = disp;
  return g;
}

CalibrationScan calibration_scan(const SmoothGateParams& base, std::span<const double> delta_min_grid,
                                 const SpinVector& psi0, const ThermalEnsemble& ens, const PropagatorOptions& opt) {
  base.validate();
  if (delta_min_grid.size() < 2) throw ParameterError("calibration scan: need at least two grid points");
  std::vector<SmoothGateParams> params;
  for (double d : delta_min_grid) {
    SmoothGateParams p = base;
    p.delta_min = d;
    p.validate();
    params.push_back(p);
  }
  CalibrationScan scan;
  scan.rows.resize(params.size());
  const double target = (base.delta_max < 0 ? -1.0 : 1.0) * kPi / 2.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    scan.rows[i].delta_min = params[i].delta_min;
    scan.rows[i].outcome = thermal_average(build_smooth_schedule(params[i]), ens, psi0, target, std::nullopt, opt);
  }
  // First population crossing coming from large |delta_min| (small angles).
  std::vector<std::size_t> order(scan.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(scan.rows[a].delta_min) > std::abs(scan.rows[b].delta_min);
  });
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const CalibrationRow& a = scan.rows[order[k]];
    const CalibrationRow& b = scan.rows[order[k + 1]];
    const double da = a.outcome.p_upup - a.outcome.p_downdown, db = b.outcome.p_upup - b.outcome.p_downdown;
    if (da > 0.0 && db <= 0.0) {
      scan.crossing_delta_min = a.delta_min + (b.delta_min - a.delta_min) * da / (da - db);
      return scan;
    }
  }
  throw NumericError("calibration scan: grid does not bracket the P(up up) = P(down down) crossing");
}

std::vector<OffsetRow> offset_scan(const PulseSchedule& s, std::span<const double> offsets,
                                   const ThermalEnsemble& ens, const SpinVector& psi0, double target_angle,
                                   const PropagatorOptions& opt) {
  std::vector<OffsetRow> rows(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    rows[i].offset = offsets[i];
    rows[i].outcome = thermal_average(s.with_detuning_offset(offsets[i]), ens, psi0, target_angle, std::nullopt, opt);
  }
  return rows;
}

}  // namespace smoothgate
