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

#include "smoothgate/scenario.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "smoothgate/csv.hpp"
#include "smoothgate/errors.hpp"
#include "smoothgate/filterfn.hpp"
#include "smoothgate/quantum.hpp"
#include "smoothgate/schedule.hpp"
#include "smoothgate/semiclassical.hpp"
#include "smoothgate/slerb.hpp"

namespace smoothgate {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

struct KeyInfo {
  const char* key;
  const char* type;
  const char* fallback;
  const char* doc;
};

// Frequencies (keys ending in _hz) are cyclic and converted to rad/s.
const std::vector<KeyInfo>& schema() {
  static const std::vector<KeyInfo> s = {
      {"scenario.name", "string", "(required)",
       "filterfn | calibration-scan | offset-scan | thermal-sweep | slerb | walsh-compare | trajectory"},
      {"scenario.output", "string", "<name>.csv", "output file name, relative to --output-dir"},
      {"scenario.seed", "uint", "1", "random seed, recorded in every output"},
      {"smooth.delta_max_hz", "double", "-400000", "detuning at the ends of the gate"},
      {"smooth.delta_min_hz", "double", "-21700", "detuning during the hold"},
      {"smooth.tau_g_s", "double", "5e-6", "amplitude ramp time"},
      {"smooth.tau_d_s", "double", "100e-6", "detuning ramp time"},
      {"smooth.t_c_s", "double", "15.8e-6", "hold time"},
      {"smooth.j", "int", "3", "detuning ramp exponent"},
      {"smooth.omega_g_hz", "double", "6000", "gate Rabi frequency"},
      {"smooth.merge_ramps", "bool", "false", "run amplitude ramps inside the detuning ramps"},
      {"smooth.calibrate", "string", "none", "none | adiabatic | numeric: rescale omega_g for a pi/2 gate"},
      {"walsh.omega_g_hz", "double", "5000", "Walsh gate Rabi frequency"},
      {"walsh.order", "int", "2", "number of loops K for single-gate scenarios"},
      {"walsh.orders", "int list", "2,4", "loop counts for filterfn and walsh-compare"},
      {"walsh.delta_hz", "double", "2 omega_g sqrt(K)", "Walsh detuning magnitude; default gives a pi/2 gate"},
      {"walsh.detuning_sign", "int", "1", "sign of the Walsh detuning"},
      {"carrier.rabi_hz", "double", "0", "carrier Rabi frequency; 0 disables the carrier"},
      {"carrier.phase_rad", "double", "0", "carrier phase (inverted at mid-gate)"},
      {"grid.freq_min_hz", "double", "15.915", "lowest noise frequency"},
      {"grid.freq_max_hz", "double", "1.5915e6", "highest noise frequency"},
      {"grid.points", "int", "400", "log-spaced noise frequencies"},
      {"grid.nbar", "double list", "0,10", "mean phonon numbers for filter functions"},
      {"grid.lambda_s_sq", "double", "2", "variance of S in the initial spin state"},
      {"grid.lambda_s2_sq", "double", "4", "variance of S^2 in the initial spin state"},
      {"scan.delta_min_start_hz", "double", "-40000", "calibration scan start"},
      {"scan.delta_min_stop_hz", "double", "-12000", "calibration scan stop"},
      {"scan.points", "int", "15", "calibration scan points"},
      {"thermal.nbar", "double", "3.5", "mean phonon number for scans"},
      {"offset.offsets_hz", "double list", "-2000,-1000,-500,0,500,1000,2000", "static detuning offsets"},
      {"sweep.gate", "string", "walsh", "smooth | walsh"},
      {"sweep.nbar", "double list", "0,2,4,8", "mean phonon numbers"},
      {"sweep.offset_hz", "double", "500", "static detuning offset"},
      {"slerb.model", "string", "parametric", "ideal | parametric | full"},
      {"slerb.lengths", "int list", "1,2,5,10,20,50,100,150,200,300,400,500", "sequence lengths N"},
      {"slerb.sequences", "int", "50", "random sequences per length"},
      {"slerb.shots", "int", "100", "shots per sequence"},
      {"slerb.eps_rb", "double", "1.5e-4", "parametric in-subspace error per Clifford"},
      {"slerb.eps_leak", "double", "8e-5", "parametric leakage per Clifford"},
      {"slerb.resamples", "int", "10000", "bootstrap resamples"},
      {"slerb.max_n", "int", "(all)", "truncate the fit at this length"},
      {"slerb.pauli_randomize", "bool", "true", "randomize the expected final state"},
      {"slerb.input", "string", "(none)", "fit this dataset CSV instead of simulating"},
      {"slerb.gate", "string", "walsh", "full model gate: smooth | walsh"},
      {"trajectory.gate", "string", "smooth", "smooth | walsh"},
      {"trajectory.branch", "double", "2", "spin eigenvalue of the branch"},
      {"trajectory.schedule_output", "string", "(none)", "also write the sampled schedule to this file"},
      {"numerics.points_per_period", "double", "64", "propagator steps per detuning period"},
      {"numerics.n_max", "int", "(auto)", "Fock cutoff"},
  };
  return s;
}

const std::set<std::string> kScenarios = {"filterfn", "calibration-scan", "offset-scan", "thermal-sweep",
                                          "slerb",    "walsh-compare",    "trajectory"};

void check_keys(const Config& cfg) {
  std::set<std::string> allowed;
  for (const KeyInfo& k : schema()) allowed.insert(k.key);
  for (const std::string& k : cfg.keys()) {
    if (!allowed.count(k)) throw ConfigError("config: unknown key " + k);
  }
  const std::string name = cfg.get_string("scenario.name");
  if (!kScenarios.count(name)) throw ConfigError("config: unknown scenario '" + name + "'");
}

double hz(const Config& c, const std::string& key, double fallback_hz) {
  return kTwoPi * c.get_double(key, fallback_hz);
}

std::string one_of(const Config& c, const std::string& key, const std::string& fallback,
                   std::initializer_list<const char*> options) {
  const std::string v = c.get_string(key, fallback);
  for (const char* o : options)
    if (v == o) return v;
  throw ConfigError("config: " + key + " = '" + v + "' is not a valid choice");
}

struct SmoothSetup {
  SmoothGateParams params;
  std::string calibrate;
};

SmoothSetup read_smooth(const Config& c) {
  SmoothSetup s;
  SmoothGateParams& p = s.params;
  p.delta_max = hz(c, "smooth.delta_max_hz", -400e3);
  p.delta_min = hz(c, "smooth.delta_min_hz", -21.7e3);
  p.tau_g = c.get_double("smooth.tau_g_s", 5e-6);
  p.tau_d = c.get_double("smooth.tau_d_s", 100e-6);
  p.t_c = c.get_double("smooth.t_c_s", 15.8e-6);
  p.j = c.get_int("smooth.j", 3);
  p.omega_g = hz(c, "smooth.omega_g_hz", 6e3);
  p.merge_ramps = c.get_bool("smooth.merge_ramps", false);
  s.calibrate = one_of(c, "smooth.calibrate", "none", {"none", "adiabatic", "numeric"});
  p.validate();
  return s;
}

double angle_target(double detuning) { return (detuning < 0 ? -1.0 : 1.0) * kPi / 2.0; }

SmoothGateParams calibrated(const SmoothSetup& s) {
  const double target = angle_target(s.params.delta_max);
  if (s.calibrate == "adiabatic") return calibrate_omega_adiabatic(s.params, target);
  if (s.calibrate == "numeric") return calibrate_omega_numeric(s.params, target);
  return s.params;
}

WalshGateParams read_walsh(const Config& c, int k) {
  const double omega = hz(c, "walsh.omega_g_hz", 5e3);
  const int sign = c.get_int("walsh.detuning_sign", 1);
  if (sign != 1 && sign != -1) throw ConfigError("config: walsh.detuning_sign must be 1 or -1");
  WalshGateParams p;
  if (c.has("walsh.delta_hz")) {
    p.order_k = k;
    p.omega_g = omega;
    p.delta_g = sign * std::abs(hz(c, "walsh.delta_hz", 0.0));
    p.validate();
  } else {
    if (!(omega > 0.0)) throw ParameterError("walsh gate: omega_g must be positive");
    if (k < 1 || (k & (k - 1)) != 0) throw ParameterError("walsh gate: K must be a power of two");
    p = WalshGateParams::calibrated(k, omega, sign);
  }
  return p;
}

std::optional<CarrierDrive> carrier_for(const Config& c, const PulseSchedule& s) {
  const double rabi = hz(c, "carrier.rabi_hz", 0.0);
  if (rabi == 0.0) return std::nullopt;
  return default_carrier(s, rabi, c.get_double("carrier.phase_rad", 0.0));
}

struct Common {
  std::string name;
  std::string output;
  std::uint64_t seed = 1;
  PropagatorOptions prop;
  std::optional<FockConfig> fock;
};

Common read_common(const Config& c, const RunOptions& opt) {
  check_keys(c);
  Common m;
  m.name = c.get_string("scenario.name");
  m.output = c.get_string("scenario.output", m.name + ".csv");
  if (m.output.empty() || m.output.find('/') != std::string::npos) {
    throw ConfigError("config: scenario.output must be a plain file name");
  }
  m.seed = opt.seed ? *opt.seed : c.get_u64("scenario.seed", 1);
  m.prop.points_per_period = c.get_double("numerics.points_per_period", 64.0);
  if (!(m.prop.points_per_period >= 8.0)) throw ConfigError("config: numerics.points_per_period must be >= 8");
  if (c.has("numerics.n_max")) {
    FockConfig f;
    f.n_max = c.get_int("numerics.n_max");
    f.validate();
    m.fock = f;
  }
  return m;
}

std::string fmt_g(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// A scenario parses everything in `prepare` and returns the computation.
using Job = std::function<std::vector<std::pair<std::string, std::pair<Table, Metadata>>>(std::ostream&)>;
using Outputs = std::vector<std::pair<std::string, std::pair<Table, Metadata>>>;

std::optional<FockConfig> fock_for(const Common& m, const ThermalEnsemble& ens) {
  if (m.fock && m.fock->n_max <= ens.n_top()) {
    throw ParameterError("numerics.n_max does not cover the thermal ensemble (need > " +
                         std::to_string(ens.n_top()) + ")");
  }
  return m.fock;
}

Job prepare_filterfn(const Config& c, const Common& m) {
  const SmoothSetup smooth = read_smooth(c);
  const std::vector<int> orders = c.get_ints("walsh.orders", {2, 4});
  std::vector<WalshGateParams> walsh;
  for (int k : orders) walsh.push_back(read_walsh(c, k));
  const std::vector<double> nbars = c.get_doubles("grid.nbar", {0.0, 10.0});
  for (double n : nbars)
    if (!(n >= 0.0)) throw ParameterError("grid.nbar entries must be non-negative");
  const double lo = hz(c, "grid.freq_min_hz", 1e2 / kTwoPi), hi = hz(c, "grid.freq_max_hz", 1e7 / kTwoPi);
  const int points = c.get_int("grid.points", 400);
  SpinStateVariances vars;
  vars.lambda_S_sq = c.get_double("grid.lambda_s_sq", 2.0);
  vars.lambda_S2_sq = c.get_double("grid.lambda_s2_sq", 4.0);
  if (vars.lambda_S_sq < 0 || vars.lambda_S2_sq < 0) throw ParameterError("grid: variances must be non-negative");
  std::vector<double> dense = {smooth.params.delta_min, smooth.params.omega_g};
  for (const auto& w : walsh) dense.push_back(w.delta_g);
  const std::vector<double> grid = default_omega_grid(lo, hi, static_cast<std::size_t>(points), dense);
  (void)m;
  return [=](std::ostream& log) {
    const SmoothGateParams sp = calibrated(smooth);
    const PulseSchedule ss = build_smooth_schedule(sp);
    log << "filterfn: smooth gate omega_g = 2pi x " << sp.omega_g / kTwoPi << " Hz, t_g = " << ss.duration()
        << " s\n";
    Table t;
    t.columns.push_back("omega_rad_s");
    std::vector<FilterFunction> cols;
    auto add = [&](const std::string& label, const FilterFunction& f) {
      t.columns.push_back(label + "_total");
      t.columns.push_back(label + "_disp");
      t.columns.push_back(label + "_angle");
      cols.push_back(f);
    };
    const double wmax = grid.back();
    const BranchTrajectory smooth_traj = propagate_displacement(ss, 1.0, make_time_grid(ss, 64.0, wmax, 16.0));
    for (double n : nbars) add("smooth_nbar" + fmt_g(n), filter_function_from_trajectory(smooth_traj, n, vars, grid));
    for (const auto& w : walsh) {
      const PulseSchedule ws = build_walsh_schedule(w);
      const BranchTrajectory wt = propagate_displacement(ws, 1.0, make_time_grid(ws, 64.0, wmax, 16.0));
      for (double n : nbars) {
        add("walsh" + std::to_string(w.order_k - 1) + "_nbar" + fmt_g(n),
            filter_function_from_trajectory(wt, n, vars, grid));
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> row{grid[i]};
      for (const auto& f : cols) {
        row.push_back(f.total[i]);
        row.push_back(f.displacement[i]);
        row.push_back(f.angle[i]);
      }
      t.add_row(row);
    }
    Metadata md = {{"smooth_omega_g_rad_s", format_double(sp.omega_g)},
                   {"smooth_gate_time_s", format_double(ss.duration())},
                   {"phase_average", "phi in {0,-pi/2}"}};
    return Outputs{{"", {t, md}}};
  };
}

Job prepare_walsh_compare(const Config& c, const Common&) {
  const std::vector<int> orders = c.get_ints("walsh.orders", {1, 2, 4});
  std::vector<WalshGateParams> walsh;
  for (int k : orders) walsh.push_back(read_walsh(c, k));
  const double nbar = c.get_doubles("grid.nbar", {0.0}).front();
  const double lo = hz(c, "grid.freq_min_hz", 1e2 / kTwoPi), hi = hz(c, "grid.freq_max_hz", 1e7 / kTwoPi);
  const int points = c.get_int("grid.points", 400);
  SpinStateVariances vars;
  vars.lambda_S_sq = c.get_double("grid.lambda_s_sq", 2.0);
  vars.lambda_S2_sq = c.get_double("grid.lambda_s2_sq", 4.0);
  std::vector<double> dense;
  for (const auto& w : walsh) dense.push_back(w.delta_g);
  const std::vector<double> grid = default_omega_grid(lo, hi, static_cast<std::size_t>(points), dense);
  return [=](std::ostream& log) {
    Table t;
    t.columns.push_back("omega_rad_s");
    std::vector<FilterFunction> cols;
    for (const auto& w : walsh) {
      log << "walsh-compare: K = " << w.order_k << "\n";
      t.columns.push_back("K" + std::to_string(w.order_k) + "_analytic");
      t.columns.push_back("K" + std::to_string(w.order_k) + "_numeric");
      cols.push_back(filter_function_walsh_analytic(w, nbar, vars, grid));
      cols.push_back(filter_function_numeric(build_walsh_schedule(w), nbar, vars, grid));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> row{grid[i]};
      for (const auto& f : cols) row.push_back(f.total[i]);
      t.add_row(row);
    }
    return Outputs{{"", {t, Metadata{{"nbar", format_double(nbar)}}}}};
  };
}

Job prepare_calibration(const Config& c, const Common& m) {
  const SmoothSetup smooth = read_smooth(c);
  const double a = hz(c, "scan.delta_min_start_hz", -40e3), b = hz(c, "scan.delta_min_stop_hz", -12e3);
  const int points = c.get_int("scan.points", 15);
  if (points < 2) throw ConfigError("config: scan.points must be at least 2");
  std::vector<double> grid;
  for (int k = 0; k < points; ++k) {
    SmoothGateParams p = smooth.params;
    p.delta_min = a + (b - a) * k / (points - 1);
    p.validate();
    grid.push_back(p.delta_min);
  }
  const ThermalEnsemble ens = ThermalEnsemble::truncated(c.get_double("thermal.nbar", 3.5));
  if (m.fock) throw ConfigError("config: numerics.n_max is chosen per scan point; remove it for calibration-scan");
  const PropagatorOptions prop = m.prop;
  return [=](std::ostream& log) {
    const SmoothGateParams sp = calibrated(smooth);
    log << "calibration-scan: omega_g = 2pi x " << sp.omega_g / kTwoPi << " Hz, " << grid.size() << " points\n";
    const CalibrationScan scan = calibration_scan(sp, grid, basis_state(kUpUp), ens, prop);
    Table t;
    t.columns = {"delta_min_hz", "p_upup", "p_downdown", "p_odd", "fidelity", "gate_angle_rad"};
    for (const CalibrationRow& r : scan.rows) {
      t.add_row({r.delta_min / kTwoPi, r.outcome.p_upup, r.outcome.p_downdown, r.outcome.p_odd, r.outcome.fidelity,
                 r.outcome.gate_angle});
    }
    Metadata md = {{"omega_g_hz", format_double(sp.omega_g / kTwoPi)},
                   {"nbar", format_double(ens.nbar)},
                   {"crossing_delta_min_hz", format_double(scan.crossing_delta_min / kTwoPi)}};
    return Outputs{{"", {t, md}}};
  };
}

Job prepare_offset(const Config& c, const Common& m) {
  const SmoothSetup smooth = read_smooth(c);
  const std::vector<double> offsets_hz =
      c.get_doubles("offset.offsets_hz", {-2000.0, -1000.0, -500.0, 0.0, 500.0, 1000.0, 2000.0});
  const int k = c.get_int("walsh.order", 2);
  const bool walsh_omega_given = c.has("walsh.omega_g_hz");
  const WalshGateParams walsh_base = read_walsh(c, k);
  const ThermalEnsemble ens = ThermalEnsemble::truncated(c.get_double("thermal.nbar", 3.5));
  if (m.fock) throw ConfigError("config: numerics.n_max is chosen per offset; remove it for offset-scan");
  const PropagatorOptions prop = m.prop;
  const Config cc = c;
  return [=](std::ostream& log) {
    const SmoothGateParams sp = calibrated(smooth);
    PulseSchedule ss = build_smooth_schedule(sp);
    ss = ss.with_carrier(carrier_for(cc, ss));
    // Matched Rabi frequency unless the Walsh block sets its own.
    const WalshGateParams wp =
        walsh_omega_given ? walsh_base : WalshGateParams::calibrated(k, sp.omega_g, walsh_base.delta_g < 0 ? -1 : 1);
    const PulseSchedule ws = build_walsh_schedule(wp);
    std::vector<double> offsets;
    for (double o : offsets_hz) offsets.push_back(kTwoPi * o);
    log << "offset-scan: smooth gate\n";
    auto rs = offset_scan(ss, offsets, ens, basis_state(kUpUp), angle_target(sp.delta_max), prop);
    log << "offset-scan: walsh gate K = " << wp.order_k << "\n";
    auto rw = offset_scan(ws, offsets, ens, basis_state(kUpUp), angle_target(wp.delta_g), prop);
    Table t;
    t.columns = {"offset_hz", "smooth_p_odd", "smooth_infidelity", "walsh_p_odd", "walsh_infidelity"};
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      t.add_row({offsets_hz[i], rs[i].outcome.p_odd, rs[i].outcome.infidelity(), rw[i].outcome.p_odd,
                 rw[i].outcome.infidelity()});
    }
    Metadata md = {{"smooth_omega_g_hz", format_double(sp.omega_g / kTwoPi)},
                   {"walsh_omega_g_hz", format_double(wp.omega_g / kTwoPi)},
                   {"walsh_k", std::to_string(wp.order_k)},
                   {"nbar", format_double(ens.nbar)}};
    return Outputs{{"", {t, md}}};
  };
}

Job prepare_thermal(const Config& c, const Common& m) {
  const std::string gate = one_of(c, "sweep.gate", "walsh", {"smooth", "walsh"});
  const SmoothSetup smooth = read_smooth(c);
  const WalshGateParams walsh = read_walsh(c, c.get_int("walsh.order", 2));
  const std::vector<double> nbars = c.get_doubles("sweep.nbar", {0.0, 2.0, 4.0, 8.0});
  std::vector<ThermalEnsemble> ens;
  for (double n : nbars) ens.push_back(ThermalEnsemble::truncated(n));
  for (const auto& e : ens) fock_for(m, e);
  const double offset = hz(c, "sweep.offset_hz", 500.0);
  const Common mm = m;
  const Config cc = c;
  return [=](std::ostream& log) {
    PulseSchedule s;
    double target;
    if (gate == "smooth") {
      const SmoothGateParams sp = calibrated(smooth);
      s = build_smooth_schedule(sp);
      target = angle_target(sp.delta_max);
    } else {
      s = build_walsh_schedule(walsh);
      target = angle_target(walsh.delta_g);
    }
    s = s.with_carrier(carrier_for(cc, s)).with_detuning_offset(offset);
    Table t;
    t.columns = {"nbar", "two_nbar_plus_one", "p_odd", "infidelity", "spin_purity"};
    std::vector<double> x, y;
    for (const ThermalEnsemble& e : ens) {
      log << "thermal-sweep: nbar = " << e.nbar << "\n";
      const GateOutcome g = thermal_average(s, e, basis_state(kUpUp), target, mm.fock, mm.prop);
      t.add_row({e.nbar, 2.0 * e.nbar + 1.0, g.p_odd, g.infidelity(), g.spin_purity});
      x.push_back(2.0 * e.nbar + 1.0);
      y.push_back(g.infidelity());
    }
    Metadata md = {{"gate", gate}, {"offset_hz", format_double(offset / kTwoPi)}};
    if (x.size() >= 2) {
      const double n = static_cast<double>(x.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
      }
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      const double icpt = (sy - slope * sx) / n;
      double ss_res = 0, ss_tot = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        ss_res += std::pow(y[i] - (icpt + slope * x[i]), 2);
        ss_tot += std::pow(y[i] - sy / n, 2);
      }
      md.push_back({"affine_slope", format_double(slope)});
      md.push_back({"affine_intercept", format_double(icpt)});
      md.push_back({"affine_r2", format_double(ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0)});
    }
    return Outputs{{"", {t, md}}};
  };
}

Table dataset_table(const SlerbDataset& d) {
  Table t;
  t.columns = {"N", "sequence_id", "shots", "n_survival", "n_flip", "n_leak"};
  for (const SequenceRecord& r : d.records) {
    t.add_row({double(r.length), double(r.sequence_id), double(r.shots), double(r.n_survival), double(r.n_flip),
               double(r.n_leak)});
  }
  return t;
}

SlerbDataset dataset_from_table(const Table& t) {
  const std::vector<std::string> want = {"N", "sequence_id", "shots", "n_survival", "n_flip", "n_leak"};
  if (t.columns != want) throw ConfigError("slerb input: expected columns N,sequence_id,shots,n_survival,n_flip,n_leak");
  SlerbDataset d;
  for (const auto& r : t.rows) {
    for (double v : r) {
      if (v != std::floor(v)) throw ConfigError("slerb input: non-integer count");
    }
    d.records.push_back(SequenceRecord{int(r[0]), int(r[1]), int(r[2]), int(r[3]), int(r[4]), int(r[5])});
  }
  d.validate();
  return d;
}

Job prepare_slerb(const Config& c, const Common& m) {
  const std::string model = one_of(c, "slerb.model", "parametric", {"ideal", "parametric", "full"});
  const std::vector<int> lengths = c.get_ints("slerb.lengths", {1, 2, 5, 10, 20, 50, 100, 150, 200, 300, 400, 500});
  for (int n : lengths)
    if (n < 1) throw ParameterError("slerb.lengths entries must be >= 1");
  const int seqs = c.get_int("slerb.sequences", 50), shots = c.get_int("slerb.shots", 100);
  if (seqs < 1 || shots < 1) throw ParameterError("slerb: sequences and shots must be positive");
  const double eps_rb = c.get_double("slerb.eps_rb", 1.5e-4), eps_leak = c.get_double("slerb.eps_leak", 8e-5);
  if (eps_rb < 0 || eps_leak < 0) throw ParameterError("slerb: error rates must be non-negative");
  const int resamples = c.get_int("slerb.resamples", 10000);
  if (resamples < 100) throw ParameterError("slerb.resamples must be at least 100");
  std::optional<int> max_n;
  if (c.has("slerb.max_n")) max_n = c.get_int("slerb.max_n");
  const bool pauli = c.get_bool("slerb.pauli_randomize", true);
  std::optional<SlerbDataset> input;
  if (c.has("slerb.input")) {
    try {
      input = dataset_from_table(read_csv(c.get_string("slerb.input")));
    } catch (const IoError& e) {
      throw ConfigError(e.what());
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  const std::string gate = one_of(c, "slerb.gate", "walsh", {"smooth", "walsh"});
  const SmoothSetup smooth = read_smooth(c);
  const WalshGateParams walsh = read_walsh(c, c.get_int("walsh.order", 1));
  const Common mm = m;
  return [=](std::ostream& log) {
    SlerbDataset data;
    if (input) {
      data = *input;
    } else {
      ErrorModel em = IdealModel{};
      if (model == "parametric") em = ParametricModel{eps_rb, eps_leak};
      if (model == "full") {
        FullScheduleModel fm;
        if (gate == "smooth") {
          const SmoothGateParams sp = calibrate_omega_numeric(smooth.params, angle_target(smooth.params.delta_max));
          fm.gate = build_smooth_schedule(sp);
        } else {
          fm.gate = build_walsh_schedule(walsh);
        }
        fm.gate_angle = gate_angle_numeric(fm.gate);
        fm.n_max = mm.fock ? mm.fock->n_max : default_fock_config(fm.gate, ThermalEnsemble::truncated(0.0)).n_max;
        fm.options = mm.prop;
        em = fm;
      }
      log << "slerb: simulating " << lengths.size() * seqs << " sequences (" << model << " model)\n";
      data = run_experiment(lengths, seqs, shots, em, mm.seed, pauli);
    }
    log << "slerb: fitting with " << resamples << " bootstrap resamples\n";
    const DecayFit fit = fit_decays(data, max_n);
    const BootstrapResult ci =
        bootstrap_ci(data, [max_n](const SlerbDataset& d) { return fit_decays(d, max_n); }, resamples, mm.seed);
    Table report;
    report.columns = {"value", "ci68_lo", "ci68_hi"};
    Metadata md = {{"model", input ? std::string("external") : model},
                   {"mean_gates_per_clifford", format_double(CliffordGroup::instance().mean_gate_count())},
                   {"eps_rb", format_double(fit.eps_rb)},
                   {"eps_rb_ci68", format_double(ci.rb.lo) + ":" + format_double(ci.rb.hi)},
                   {"eps_leak", format_double(fit.eps_leak)},
                   {"eps_leak_ci68", format_double(ci.leak.lo) + ":" + format_double(ci.leak.hi)},
                   {"eps_flip", format_double(fit.eps_flip)},
                   {"eps_2q", format_double(fit.eps_2q)},
                   {"eps_2q_ci68", format_double(ci.two_q.lo) + ":" + format_double(ci.two_q.hi)},
                   {"max_n", std::to_string(fit.max_n)},
                   {"reduced_chi2", format_double(fit.reduced_chi2)},
                   {"resamples", std::to_string(ci.resamples)}};
    return Outputs{{"", {dataset_table(data), {}}}, {"_fit.txt", {Table{}, md}}};
  };
}

Job prepare_trajectory(const Config& c, const Common&) {
  const std::string gate = one_of(c, "trajectory.gate", "smooth", {"smooth", "walsh"});
  const SmoothSetup smooth = read_smooth(c);
  const WalshGateParams walsh = read_walsh(c, c.get_int("walsh.order", 2));
  const double branch = c.get_double("trajectory.branch", 2.0);
  const std::string sched_out = c.get_string("trajectory.schedule_output", "");
  if (sched_out.find('/') != std::string::npos) throw ConfigError("config: schedule_output must be a plain file name");
  return [=](std::ostream& log) {
    const PulseSchedule s = gate == "smooth" ? build_smooth_schedule(calibrated(smooth)) : build_walsh_schedule(walsh);
    log << "trajectory: " << gate << " gate, t_g = " << s.duration() << " s\n";
    const BranchTrajectory tr = propagate_displacement(s, branch);
    const BranchTrajectory fm = to_rotating_frame(tr);
    Table t;
    t.columns = {"t_s", "re_gamma", "im_gamma", "eta_rad", "theta_rad", "re_gamma_mode", "im_gamma_mode"};
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      t.add_row({tr.t[k], tr.gamma[k].real(), tr.gamma[k].imag(), tr.eta[k], tr.theta[k], fm.gamma[k].real(),
                 fm.gamma[k].imag()});
    }
    Outputs out{{"", {t, Metadata{{"branch_eigenvalue", format_double(branch)},
                                  {"final_abs_gamma", format_double(std::abs(tr.final_gamma()))}}}}};
    if (!sched_out.empty()) {
      const ScheduleSamples ss = sample_schedule(s, 2001);
      Table st;
      st.columns = {"t_s", "omega_rad_s", "delta_rad_s", "phase_rad"};
      for (std::size_t k = 0; k < ss.t.size(); ++k) st.add_row({ss.t[k], ss.omega[k], ss.delta[k], ss.phase[k]});
      out.push_back({"=" + sched_out, {st, {}}});
    }
    return out;
  };
}

Job prepare(const Config& c, const Common& m) {
  if (m.name == "filterfn") return prepare_filterfn(c, m);
  if (m.name == "walsh-compare") return prepare_walsh_compare(c, m);
  if (m.name == "calibration-scan") return prepare_calibration(c, m);
  if (m.name == "offset-scan") return prepare_offset(c, m);
  if (m.name == "thermal-sweep") return prepare_thermal(c, m);
  if (m.name == "slerb") return prepare_slerb(c, m);
  return prepare_trajectory(c, m);
}

std::string file_name(const std::string& output, const std::string& suffix) {
  if (suffix.empty()) return output;
  if (suffix[0] == '=') return suffix.substr(1);
  const auto dot = output.rfind('.');
  return (dot == std::string::npos ? output : output.substr(0, dot)) + suffix;
}

}  // namespace

void validate_scenario(const Config& cfg) {
  const Common m = read_common(cfg, RunOptions{});
  (void)prepare(cfg, m);
}

std::vector<OutputFile> run_scenario(const Config& cfg, const RunOptions& opt, std::ostream& log) {
  const Common m = read_common(cfg, opt);
  const Job job = prepare(cfg, m);
  std::ostringstream sink;
  std::ostream& out = opt.quiet ? sink : log;
  const Outputs results = job(out);

  std::ostringstream hashed;
  hashed << cfg.text() << "\nseed=" << m.seed;
  const Metadata header = {{"tool", std::string("smoothgate ") + kVersion},
                           {"scenario", m.name},
                           {"config_hash", "fnv1a64:" + fnv1a_hex(hashed.str())},
                           {"seed", std::to_string(m.seed)},
                           {"generated", utc_now()}};
  std::vector<OutputFile> files;
  for (const auto& [suffix, body] : results) {
    Metadata md = header;
    md.insert(md.end(), body.second.begin(), body.second.end());
    OutputFile f;
    f.name = file_name(m.output, suffix);
    if (body.first.columns.empty()) {
      std::ostringstream os;
      for (const auto& [k, v] : md) os << (k == "tool" || k == "scenario" || k == "config_hash" || k == "seed" ||
                                                   k == "generated"
                                               ? "# "
                                               : "")
                                       << k << "=" << v << "\n";
      f.content = os.str();
    } else {
      f.content = render_csv(body.first, md);
    }
    files.push_back(std::move(f));
  }
  return files;
}

void write_outputs(const std::vector<OutputFile>& files, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    for (const auto& p : temps) fs::remove(p, ec);
  };
  for (const OutputFile& f : files) {
    const fs::path tmp = dir / (f.name + ".partial");
    temps.push_back(tmp);
    std::ofstream os(tmp, std::ios::binary);
    os << f.content;
    if (!os.flush()) {
      cleanup();
      throw IoError("cannot write " + tmp.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::rename(temps[i], dir / files[i].name, ec);
    if (ec) {
      cleanup();
      throw IoError("cannot rename " + temps[i].string() + ": " + ec.message());
    }
  }
}

std::string config_schema() {
  std::ostringstream os;
  os << "# smoothgate " << kVersion << " configuration keys\n"
     << "# Sections are [name] headers; keys ending in _hz are cyclic frequencies (converted to rad/s).\n";
  std::string section;
  for (const KeyInfo& k : schema()) {
    const std::string key = k.key;
    const std::string sec = key.substr(0, key.find('.'));
    if (sec != section) {
      os << "\n[" << sec << "]\n";
      section = sec;
    }
    os << key.substr(key.find('.') + 1) << " : " << k.type << " = " << k.fallback << "    ; " << k.doc << "\n";
  }
  return os.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return 3;
  if (dynamic_cast<const NumericError*>(&e)) return 2;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
      dynamic_cast<const DomainError*>(&e)) {
    return 1;
  }
  return 2;
}

}  // namespace smoothgate
