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

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace smoothgate {

// Composite Simpson rule on a non-uniform grid. An odd trailing interval is
// closed with the three-point end formula.
double integrate_samples(std::span<const double> t, std::span<const double> f);
std::complex<double> integrate_samples(std::span<const double> t, std::span<const std::complex<double>> f);

// Same, but restarted at each index in `piece_starts` so that kinks at those
// samples do not degrade the order. piece_starts must begin with 0 and end
// with t.size() - 1.
double integrate_pieces(std::span<const double> t, std::span<const double> f,
                        std::span<const std::size_t> piece_starts);
std::complex<double> integrate_pieces(std::span<const double> t, std::span<const std::complex<double>> f,
                                      std::span<const std::size_t> piece_starts);

struct AdaptedGrid {
  std::vector<double> t;
  std::vector<std::size_t> piece_starts;  // indices of breakpoints in t
};

// Grid whose local spacing is 2*pi / (points_per_period * rate(t)), with at
// least min_points intervals between consecutive breakpoints. `rate` receives
// the piece index and the time.
AdaptedGrid adapted_grid(std::span<const double> breakpoints, const std::function<double(std::size_t, double)>& rate,
                         double points_per_period, std::size_t min_points);

// Five-point Gauss-Legendre rule on [a, b].
// 5-point Gauss-Legendre nodes and weights on [-1, 1].
inline constexpr std::array<double, 5> kGl5x = {0.0, -0.53846931010568309104, 0.53846931010568309104,
                                                -0.90617984593866399280, 0.90617984593866399280};
inline constexpr std::array<double, 5> kGl5w = {0.56888888888888888889, 0.47862867049936646804,
                                                0.47862867049936646804, 0.23692688505618908751,
                                                0.23692688505618908751};

double gauss_legendre5(const std::function<double(double)>& f, double a, double b);

}  // namespace smoothgate
