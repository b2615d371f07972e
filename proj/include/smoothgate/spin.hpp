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
#include <array>

namespace smoothgate {

// Two-qubit spin basis in sigma_z order with up at index 0:
// 0 = up up, 1 = up down, 2 = down up, 3 = down down.
using SpinVector = Eigen::Vector4cd;
using SpinMatrix = Eigen::Matrix4cd;

enum SpinIndex { kUpUp = 0, kUpDown = 1, kDownUp = 2, kDownDown = 3 };

Eigen::Matrix2cd pauli_phi(double phi);  // cos(phi) X + sin(phi) Y
SpinMatrix collective_spin(double phi);  // S = sigma_phi (x) 1 + 1 (x) sigma_phi

// Eigen-decomposition of collective_spin(phi): eigenvalues {2, -2, 0, 0}.
struct SpinEigenbasis {
  std::array<double, 4> eigenvalue;
  std::array<SpinVector, 4> vector;
};
SpinEigenbasis collective_eigenbasis(double phi);

// exp(i theta S^2 / 4), the ideal entangling gate in basis phi.
SpinMatrix ideal_gate(double theta, double phi);

SpinVector basis_state(SpinIndex i);

struct SpinStateVariances {
  double lambda_S_sq = 0.0;
  double lambda_S2_sq = 0.0;
  double mean_S = 0.0;
  double mean_S2 = 0.0;
};

SpinStateVariances spin_variances(const SpinVector& psi0, double basis_phase);

// |up up> in basis x: lambda_S^2 = 2, lambda_S2^2 = 4.
SpinStateVariances default_variances();

}  // namespace smoothgate
