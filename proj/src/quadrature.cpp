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

#include "smoothgate/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "smoothgate/errors.hpp"

namespace smoothgate {

namespace {

template <typename T>
T simpson(std::span<const double> t, std::span<const T> f, std::size_t lo, std::size_t hi) {
  T acc{};
  const std::size_t n = hi - lo;
  if (n == 0) return acc;
  if (n == 1) return 0.5 * (t[hi] - t[lo]) * (f[lo] + f[hi]);
  std::size_t i = lo;
  for (; i + 2 <= hi; i += 2) {
    const double h0 = t[i + 1] - t[i], h1 = t[i + 2] - t[i + 1];
    const double s = h0 + h1;
    acc += s / 6.0 * ((2.0 - h1 / h0) * f[i] + s * s / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
  }
  if (i < hi) {
    const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
    acc += f[i + 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1)) +
           f[i] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0) - f[i - 1] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
  }
  return acc;
}

template <typename T>
T pieces(std::span<const double> t, std::span<const T> f, std::span<const std::size_t> starts) {
  if (t.size() != f.size()) throw ParameterError("integrate: sample count mismatch");
  if (starts.size() < 2 || starts.front() != 0 || starts.back() != t.size() - 1) {
    throw ParameterError("integrate: malformed piece boundaries");
  }
  T acc{};
  for (std::size_t k = 0; k + 1 < starts.size(); ++k) acc += simpson(t, f, starts[k], starts[k + 1]);
  return acc;
}

}  // namespace

double integrate_samples(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) throw ParameterError("integrate: sample count mismatch");
  if (t.empty()) return 0.0;
  return simpson(t, f, 0, t.size() - 1);
}

std::complex<double> integrate_samples(std::span<const double> t, std::span<const std::complex<double>> f) {
  if (t.size() != f.size()) throw ParameterError("integrate: sample count mismatch");
  if (t.empty()) return 0.0;
  return simpson(t, f, 0, t.size() - 1);
}

double integrate_pieces(std::span<const double> t, std::span<const double> f,
                        std::span<const std::size_t> piece_starts) {
  return pieces(t, f, piece_starts);
}

std::complex<double> integrate_pieces(std::span<const double> t, std::span<const std::complex<double>> f,
                                      std::span<const std::size_t> piece_starts) {
  return pieces(t, f, piece_starts);
}

AdaptedGrid adapted_grid(std::span<const double> breakpoints, const std::function<double(std::size_t, double)>& rate,
                         double points_per_period, std::size_t min_points) {
  if (breakpoints.size() < 2) throw ParameterError("grid: need at least two breakpoints");
  if (!(points_per_period > 0.0)) throw ParameterError("grid: points per period must be positive");
  constexpr std::size_t kProbe = 256;
  AdaptedGrid g;
  g.t.push_back(breakpoints.front());
  g.piece_starts.push_back(0);
  std::vector<double> cum(kProbe + 1), tp(kProbe + 1);
  for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
    const double a = breakpoints[p], b = breakpoints[p + 1];
    if (!(b > a)) continue;
    // Cumulative phase on a probe grid, then invert it at equal increments.
    double prev = std::abs(rate(p, a));
    cum[0] = 0.0;
    tp[0] = a;
    for (std::size_t k = 1; k <= kProbe; ++k) {
      tp[k] = a + (b - a) * static_cast<double>(k) / kProbe;
      const double r = std::abs(rate(p, tp[k]));
      cum[k] = cum[k - 1] + 0.5 * (r + prev) * (tp[k] - tp[k - 1]);
      prev = r;
    }
    const double total = cum[kProbe] * points_per_period / (2.0 * std::numbers::pi);
    if (!std::isfinite(total)) throw NumericError("grid: non-finite rate");
    const std::size_t n = std::max<std::size_t>(min_points, static_cast<std::size_t>(std::ceil(total)));
    std::size_t k = 0;
    for (std::size_t i = 1; i < n; ++i) {
      double target = cum[kProbe] * static_cast<double>(i) / n;
      double t;
      if (cum[kProbe] > 0.0) {
        while (k + 1 < kProbe && cum[k + 1] < target) ++k;
        const double span = cum[k + 1] - cum[k];
        const double w = span > 0.0 ? (target - cum[k]) / span : 0.0;
        t = tp[k] + w * (tp[k + 1] - tp[k]);
      } else {
        t = a + (b - a) * static_cast<double>(i) / n;
      }
      g.t.push_back(t);
    }
    g.t.push_back(b);
    g.piece_starts.push_back(g.t.size() - 1);
  }
  return g;
}

double gauss_legendre5(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) acc += kGl5w[i] * f(c + h * kGl5x[i]);
  return acc * h;
}

}  // namespace smoothgate
