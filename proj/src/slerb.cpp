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

#include "smoothgate/slerb.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <string>

#include "smoothgate/errors.hpp"
#include "smoothgate/parallel.hpp"
#include "smoothgate/rng.hpp"
#include "smoothgate/spin.hpp"

namespace smoothgate {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

bool equal_up_to_phase(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  return std::abs((a.adjoint() * b).trace()) > 2.0 - 1e-9;
}

}  // namespace

Eigen::Matrix2cd logical_gate(double angle, double phase) {
  const SpinMatrix u = ideal_gate(angle, phase);
  Eigen::Matrix2cd g;
  g << u(kUpUp, kUpUp), u(kUpUp, kDownDown), u(kDownDown, kUpUp), u(kDownDown, kDownDown);
  return g;
}

CliffordGroup::CliffordGroup() {
  std::vector<CompiledGate> gens;
  for (int k = 0; k < 4; ++k) gens.push_back(CompiledGate{kPi / 2.0, (k * kPi / 2.0 - kPi) / 2.0});
  elements_.push_back(SubspaceClifford{0, Eigen::Matrix2cd::Identity(), {}});
  // Breadth-first search gives a shortest word for every element.
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int e = queue.front();
    queue.pop_front();
    for (const CompiledGate& g : gens) {
      const Eigen::Matrix2cd u = logical_gate(g.angle, g.phase) * elements_[e].unitary;
      if (find(u) >= 0) continue;
      SubspaceClifford c{static_cast<int>(elements_.size()), u, elements_[e].gates};
      c.gates.push_back(g);
      elements_.push_back(c);
      queue.push_back(c.index);
    }
  }
  if (elements_.size() != 24) throw std::logic_error("clifford group: closure has wrong order");
  const int n = size();
  table_.assign(n, std::vector<int>(n, -1));
  inverse_.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    inverse_[a] = find(elements_[a].unitary.adjoint());
    for (int b = 0; b < n; ++b) table_[a][b] = find(elements_[a].unitary * elements_[b].unitary);
  }
  Eigen::Matrix2cd x;
  x << 0.0, 1.0, 1.0, 0.0;
  pauli_x_ = find(x);
}

const CliffordGroup& CliffordGroup::instance() {
  static const CliffordGroup group;
  return group;
}

int CliffordGroup::find(const Eigen::Matrix2cd& u) const {
  for (const SubspaceClifford& c : elements_) {
    if (equal_up_to_phase(c.unitary, u)) return c.index;
  }
  return -1;
}

double CliffordGroup::mean_gate_count() const {
  double acc = 0.0;
  for (const SubspaceClifford& c : elements_) acc += static_cast<double>(c.gates.size());
  return acc / static_cast<double>(elements_.size());
}

std::vector<CompiledGate> SlerbSequence::gates() const {
  const CliffordGroup& g = CliffordGroup::instance();
  std::vector<CompiledGate> out;
  for (int c : cliffords) out.insert(out.end(), g.element(c).gates.begin(), g.element(c).gates.end());
  out.insert(out.end(), g.element(inverse).gates.begin(), g.element(inverse).gates.end());
  return out;
}

SlerbSequence generate_sequence(int length, std::uint64_t seed, bool pauli_randomize) {
  if (length < 1) throw ParameterError("slerb: sequence length must be at least 1");
  const CliffordGroup& g = CliffordGroup::instance();
  CounterRng rng(seed, 0);
  SlerbSequence s;
  s.length = length;
  s.seed = seed;
  s.pauli_randomized = pauli_randomize;
  int total = g.identity();
  for (int k = 0; k < length; ++k) {
    const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.size())));
    s.cliffords.push_back(c);
    total = g.compose(c, total);
  }
  s.inverse = g.inverse(total);
  if (pauli_randomize && rng.below(2) == 1) {
    s.inverse = g.compose(g.pauli_x(), s.inverse);
    s.expect_flipped = true;
  }
  return s;
}

struct SequenceSimulator::Impl {
  enum class Kind { kIdeal, kParametric, kFull } kind = Kind::kIdeal;
  double p_dep = 0.0, q_leak = 0.0;
  // full-schedule data
  int n_max = 0, n0 = 0;
  double phase_shift = 0.0;
  std::vector<std::pair<double, Eigen::MatrixXcd>> unitaries;

  const Eigen::MatrixXcd& unitary_for(double phase) const {
    for (const auto& [p, u] : unitaries) {
      if (std::abs(std::remainder(p - phase, 2.0 * kPi)) < 1e-12) return u;
    }
    throw ParameterError("slerb: no cached unitary for gate phase " + std::to_string(phase));
  }
};

SequenceSimulator::SequenceSimulator(const ErrorModel& model) {
  auto impl = std::make_shared<Impl>();
  if (const auto* pm = std::get_if<ParametricModel>(&model)) {
    const double g = CliffordGroup::instance().mean_gate_count();
    if (!(pm->eps_rb >= 0.0) || !(pm->eps_leak >= 0.0)) throw ParameterError("slerb: negative error rate");
    impl->kind = Impl::Kind::kParametric;
    impl->p_dep = 2.0 * pm->eps_rb / g;
    impl->q_leak = pm->eps_leak / g;
    if (impl->p_dep > 1.0 || impl->q_leak > 1.0) throw ParameterError("slerb: error rate too large for the channel");
  } else if (const auto* fm = std::get_if<FullScheduleModel>(&model)) {
    if (fm->gate.basis_phase() != 0.0) throw ParameterError("slerb: full-schedule gate must use basis phase 0");
    if (fm->gate_angle == 0.0) throw ParameterError("slerb: full-schedule gate angle must be nonzero");
    if (fm->n0 < 0 || fm->n0 >= fm->n_max) throw ParameterError("slerb: initial Fock state outside the cutoff");
    impl->kind = Impl::Kind::kFull;
    impl->n_max = fm->n_max;
    impl->n0 = fm->n0;
    impl->phase_shift = fm->gate_angle < 0 ? kPi / 2.0 : 0.0;
    // Propagate in a padded space so that columns near n_max stay clear of the
    // truncation edge, then keep the n <= n_max block.
    const int m = fm->n_max + 1;
    const int dim = 4 * m;
    const int big = default_fock_config(fm->gate, ThermalEnsemble::with_cutoff(0.0, fm->n_max)).n_max;
    Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(4 * (big + 1), dim);
    for (int sp = 0; sp < 4; ++sp)
      for (int n = 0; n < m; ++n) cols(CompositeState::index(sp, n, big), sp * m + n) = 1.0;
    const Eigen::MatrixXcd ub = propagate_columns(fm->gate, cols, big, fm->options);
    Eigen::MatrixXcd u0(dim, dim);
    for (int sp = 0; sp < 4; ++sp) u0.middleRows(sp * m, m) = ub.middleRows(sp * (big + 1), m);
    for (int k = 0; k < 4; ++k) {
      const double phase = (k * kPi / 2.0 - kPi) / 2.0 + impl->phase_shift;
      // exp(-i phase (Z1 + Z2) / 2) rotates S_0 into S_phase.
      const std::array<cd, 4> r = {std::polar(1.0, -phase), 1.0, 1.0, std::polar(1.0, phase)};
      Eigen::MatrixXcd u = u0;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) u(i, j) *= r[i / m] * std::conj(r[j / m]);
      impl->unitaries.emplace_back(phase, std::move(u));
    }
  }
  impl_ = impl;
}

OutcomeProbabilities SequenceSimulator::probabilities(const SlerbSequence& seq) const {
  const Impl& im = *impl_;
  const int expect = seq.expect_flipped ? 1 : 0;
  OutcomeProbabilities out;
  const std::vector<CompiledGate> gates = seq.gates();
  if (im.kind == Impl::Kind::kFull) {
    const int m = im.n_max + 1;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4 * m);
    psi(CompositeState::index(kUpUp, im.n0, im.n_max)) = 1.0;
    for (const CompiledGate& g : gates) psi = im.unitary_for(g.phase + im.phase_shift) * psi;
    const double puu = psi.segment(kUpUp * m, m).squaredNorm();
    const double pdd = psi.segment(kDownDown * m, m).squaredNorm();
    out.survival = expect ? pdd : puu;
    out.flip = expect ? puu : pdd;
    out.leak = std::max(0.0, 1.0 - puu - pdd);
    return out;
  }
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  rho(0, 0) = 1.0;
  double odd = 0.0;
  for (const CompiledGate& g : gates) {
    const Eigen::Matrix2cd u = logical_gate(g.angle, g.phase);
    rho = u * rho * u.adjoint();
    if (im.kind == Impl::Kind::kParametric) {
      const cd tr = rho.trace();
      rho = (1.0 - im.p_dep) * rho + (0.5 * im.p_dep * tr) * Eigen::Matrix2cd::Identity();
      const double inside = rho.trace().real();
      rho = (1.0 - im.q_leak) * rho + (0.5 * im.q_leak * odd) * Eigen::Matrix2cd::Identity();
      odd = (1.0 - im.q_leak) * odd + im.q_leak * inside;
    }
  }
  out.survival = rho(expect, expect).real();
  out.flip = rho(1 - expect, 1 - expect).real();
  out.leak = odd;
  return out;
}

OutcomeProbabilities sequence_probabilities(const SlerbSequence& seq, const ErrorModel& model) {
  return SequenceSimulator(model).probabilities(seq);
}

ShotCounts sample_shots(const OutcomeProbabilities& p, int shots, std::uint64_t seed, std::uint64_t stream) {
  if (shots < 0) throw ParameterError("slerb: negative shot count");
  CounterRng rng(seed, stream);
  ShotCounts c;
  for (int k = 0; k < shots; ++k) {
    const double u = rng.uniform();
    if (u < p.survival) {
      ++c.survival;
    } else if (u < p.survival + p.flip) {
      ++c.flip;
    } else {
      ++c.leak;
    }
  }
  return c;
}

ShotCounts simulate_sequence(const SlerbSequence& seq, const ErrorModel& model, int shots, std::uint64_t seed) {
  return sample_shots(sequence_probabilities(seq, model), shots, seed, 1);
}

void SlerbDataset::validate() const {
  for (const SequenceRecord& r : records) {
    if (r.length < 1 || r.shots < 0 || r.n_survival < 0 || r.n_flip < 0 || r.n_leak < 0) {
      throw ParameterError("slerb dataset: negative or zero entries");
    }
    if (r.n_survival + r.n_flip + r.n_leak != r.shots) {
      throw ParameterError("slerb dataset: counts do not sum to shots for N = " + std::to_string(r.length));
    }
  }
}

std::vector<int> SlerbDataset::lengths() const {
  std::vector<int> n;
  for (const SequenceRecord& r : records) n.push_back(r.length);
  std::sort(n.begin(), n.end());
  n.erase(std::unique(n.begin(), n.end()), n.end());
  return n;
}

namespace {

std::uint64_t sequence_stream(std::size_t length_index, int sequence) {
  return (static_cast<std::uint64_t>(length_index) << 32) | static_cast<std::uint32_t>(sequence);
}

}  // namespace

SlerbDataset run_experiment(std::span<const int> lengths, int sequences_per_length, int shots,
                            const ErrorModel& model, std::uint64_t seed, bool pauli_randomize) {
  if (sequences_per_length < 1 || shots < 1) throw ParameterError("slerb: need at least one sequence and one shot");
  const SequenceSimulator sim(model);
  const std::size_t nseq = static_cast<std::size_t>(sequences_per_length);
  SlerbDataset data;
  data.records.resize(lengths.size() * nseq);
  parallel_for(data.records.size(), [&](std::size_t k) {
    const std::size_t i = k / nseq;
    const int j = static_cast<int>(k % nseq);
    const std::uint64_t stream = sequence_stream(i, j);
    const SlerbSequence seq = generate_sequence(lengths[i], CounterRng(seed, stream).next(), pauli_randomize);
    const ShotCounts c = sample_shots(sim.probabilities(seq), shots, seed, stream | (1ULL << 63));
    data.records[k] = SequenceRecord{lengths[i], j, shots, c.survival, c.flip, c.leak};
  });
  return data;
}

OutcomeProbabilities decay_model(double eps_rb, double eps_leak, int length) {
  const double m = length + 1.0;
  const double l = 0.5 * (1.0 + std::pow(1.0 - 2.0 * eps_leak, m));
  const double z = std::pow((1.0 - eps_leak) * (1.0 - 2.0 * eps_rb), m);
  return OutcomeProbabilities{0.5 * (l + z), 0.5 * (l - z), 1.0 - l};
}

SlerbDataset synthesize_from_decay_model(double eps_rb, double eps_leak, std::span<const int> lengths,
                                         int sequences_per_length, int shots, std::uint64_t seed) {
  if (sequences_per_length < 1 || shots < 1) throw ParameterError("slerb: need at least one sequence and one shot");
  SlerbDataset data;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const OutcomeProbabilities p = decay_model(eps_rb, eps_leak, lengths[i]);
    for (int j = 0; j < sequences_per_length; ++j) {
      const ShotCounts c = sample_shots(p, shots, seed, sequence_stream(i, j));
      data.records.push_back(SequenceRecord{lengths[i], j, shots, c.survival, c.flip, c.leak});
    }
  }
  return data;
}

namespace {

struct LengthTotals {
  int length = 0;
  double shots = 0, survival = 0, flip = 0, leak = 0;
};

std::vector<LengthTotals> aggregate(const SlerbDataset& data, int max_n) {
  std::map<int, LengthTotals> m;
  for (const SequenceRecord& r : data.records) {
    if (r.length > max_n) continue;
    LengthTotals& t = m[r.length];
    t.length = r.length;
    t.shots += r.shots;
    t.survival += r.n_survival;
    t.flip += r.n_flip;
    t.leak += r.n_leak;
  }
  std::vector<LengthTotals> out;
  for (auto& [n, t] : m) {
    if (t.shots > 0) out.push_back(t);
  }
  return out;
}

double minimize_rate(const std::function<double(double)>& cost, const char* what) {
  constexpr double kUpper = 0.25;
  const auto [x, fx] = boost::math::tools::brent_find_minima(cost, 0.0, kUpper, 50);
  if (cost(0.0) <= fx) return 0.0;
  if (x > kUpper * (1.0 - 1e-6)) throw ConvergenceError(std::string("slerb fit: ") + what + " hit the search bound");
  return x;
}

}  // namespace

DecayFit fit_decays(const SlerbDataset& data, std::optional<int> max_n) {
  data.validate();
  const int limit = max_n.value_or(std::numeric_limits<int>::max());
  const std::vector<LengthTotals> t = aggregate(data, limit);
  if (t.size() < 3) throw ParameterError("slerb fit: need at least three distinct sequence lengths");

  DecayFit fit;
  fit.max_n = t.back().length;

  bool any_leak = false;
  for (const LengthTotals& x : t) any_leak |= x.leak > 0;

  // Weights come from the data on the first pass and from the fitted model
  // afterwards; data-derived weights favour low-count fluctuations.
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<double> var_leak(t.size()), var_z(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const LengthTotals& x = t[i];
      double pl = x.leak / x.shots, ps = x.survival / x.shots, pf = x.flip / x.shots;
      if (pass > 0) {
        const OutcomeProbabilities m = decay_model(fit.eps_rb, fit.eps_leak, x.length);
        pl = m.leak;
        ps = m.survival;
        pf = m.flip;
      }
      var_leak[i] = std::max(pl * (1.0 - pl), 1.0 / x.shots) / x.shots;
      var_z[i] = std::max(ps + pf - (ps - pf) * (ps - pf), 1.0 / x.shots) / x.shots;
    }
    if (any_leak) {
      fit.eps_leak = minimize_rate(
          [&](double e) {
            double acc = 0.0;
            for (std::size_t i = 0; i < t.size(); ++i) {
              const double r = t[i].leak / t[i].shots - decay_model(0.0, e, t[i].length).leak;
              acc += r * r / var_leak[i];
            }
            return acc;
          },
          "eps_leak");
    }
    fit.eps_rb = minimize_rate(
        [&](double e) {
          double acc = 0.0;
          for (std::size_t i = 0; i < t.size(); ++i) {
            const double z = (t[i].survival - t[i].flip) / t[i].shots;
            const OutcomeProbabilities m = decay_model(e, fit.eps_leak, t[i].length);
            const double r = z - (m.survival - m.flip);
            acc += r * r / var_z[i];
          }
          return acc;
        },
        "eps_rb");
  }

  fit.eps_flip = 0.5 * (0.5 * std::log1p(-2.0 * fit.eps_leak) - std::log1p(-fit.eps_leak) -
                        std::log1p(-2.0 * fit.eps_rb));
  fit.eps_2q = error_per_gate(fit.eps_rb, fit.eps_leak);

  double chi2 = 0.0;
  int terms = 0;
  for (const LengthTotals& x : t) {
    const OutcomeProbabilities m = decay_model(fit.eps_rb, fit.eps_leak, x.length);
    const double vl = m.leak * (1.0 - m.leak) / x.shots;
    if (vl > 0.0) {
      chi2 += std::pow(x.leak / x.shots - m.leak, 2) / vl;
      ++terms;
    }
    const double zm = m.survival - m.flip;
    const double vz = (m.survival + m.flip - zm * zm) / x.shots;
    if (vz > 0.0) {
      chi2 += std::pow((x.survival - x.flip) / x.shots - zm, 2) / vz;
      ++terms;
    }
  }
  fit.reduced_chi2 = terms > 2 ? chi2 / (terms - 2) : 0.0;
  return fit;
}

double error_per_gate(double eps_rb, double eps_leak) {
  return (6.0 / 5.0 * eps_rb + 4.0 / 5.0 * eps_leak) * 6.0 / 13.0;
}

double error_per_gate(const DecayFit& fit) { return error_per_gate(fit.eps_rb, fit.eps_leak); }

namespace {

std::vector<std::vector<std::size_t>> group_by_length(const SlerbDataset& data) {
  std::map<int, std::vector<std::size_t>> m;
  for (std::size_t i = 0; i < data.records.size(); ++i) m[data.records[i].length].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [n, idx] : m) out.push_back(std::move(idx));
  return out;
}

SlerbDataset resample(const SlerbDataset& data, const std::vector<std::vector<std::size_t>>& groups,
                      std::uint64_t seed, std::uint64_t r) {
  CounterRng rng(seed, r);
  SlerbDataset out;
  out.records.reserve(data.records.size());
  for (const auto& g : groups) {
    for (std::size_t k = 0; k < g.size(); ++k) out.records.push_back(data.records[g[rng.below(g.size())]]);
  }
  return out;
}

Interval percentile_interval(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, v.size() - 1);
    return v[i] + (pos - static_cast<double>(i)) * (v[j] - v[i]);
  };
  return Interval{q(0.16), q(0.84)};
}

}  // namespace

BootstrapResult bootstrap_ci(const SlerbDataset& data, const FitFunction& fit, int resamples, std::uint64_t seed) {
  if (resamples < 100) throw ParameterError("bootstrap: need at least 100 resamples");
  if (data.records.empty()) throw ParameterError("bootstrap: empty dataset");
  data.validate();
  const auto groups = group_by_length(data);
  std::vector<double> rb(resamples), leak(resamples), two(resamples);
  parallel_for(static_cast<std::size_t>(resamples), [&](std::size_t r) {
    const DecayFit f = fit(resample(data, groups, seed, r));
    rb[r] = f.eps_rb;
    leak[r] = f.eps_leak;
    two[r] = f.eps_2q;
  });
  BootstrapResult out;
  out.rb = percentile_interval(rb);
  out.leak = percentile_interval(leak);
  out.two_q = percentile_interval(two);
  out.resamples = resamples;
  return out;
}

TruncationScan truncation_scan(const SlerbDataset& data, std::span<const int> max_ns, int resamples,
                               std::uint64_t seed) {
  if (resamples < 100) throw ParameterError("truncation scan: need at least 100 resamples");
  if (max_ns.empty()) throw ParameterError("truncation scan: no truncation lengths");
  data.validate();
  const auto groups = group_by_length(data);
  const std::size_t k = max_ns.size();
  const DecayFit full = fit_decays(data);
  std::vector<double> observed(k);
  for (std::size_t i = 0; i < k; ++i) observed[i] = fit_decays(data, max_ns[i]).eps_2q;

  std::vector<std::vector<double>> est(k, std::vector<double>(resamples));
  std::vector<std::vector<double>> diff(k, std::vector<double>(resamples));
  parallel_for(static_cast<std::size_t>(resamples), [&](std::size_t r) {
    const SlerbDataset d = resample(data, groups, seed, r);
    const double f = fit_decays(d).eps_2q;
    for (std::size_t i = 0; i < k; ++i) {
      est[i][r] = fit_decays(d, max_ns[i]).eps_2q;
      diff[i][r] = est[i][r] - f;
    }
  });
  TruncationScan scan;
  for (std::size_t i = 0; i < k; ++i) {
    double mean = 0.0, var = 0.0;
    for (double x : diff[i]) mean += x;
    mean /= resamples;
    for (double x : diff[i]) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / (resamples - 1));
    const double d = observed[i] - full.eps_2q;
    if (sd > 0.0 && std::abs(d) > 3.0 * sd) scan.non_markovian = true;
    scan.rows.push_back(TruncationRow{max_ns[i], observed[i], percentile_interval(est[i])});
  }
  return scan;
}

}  // namespace smoothgate
