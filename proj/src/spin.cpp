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

#include "smoothgate/spin.hpp"

#include <cmath>
#include <complex>

#include "smoothgate/errors.hpp"

namespace smoothgate {

using cd = std::complex<double>;

Eigen::Matrix2cd pauli_phi(double phi) {
  Eigen::Matrix2cd m;
  m << 0.0, std::polar(1.0, -phi), std::polar(1.0, phi), 0.0;
  return m;
}

SpinMatrix collective_spin(double phi) {
  const Eigen::Matrix2cd s = pauli_phi(phi);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  SpinMatrix out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) out(2 * a + b, 2 * c + d) = s(a, c) * id(b, d) + id(a, c) * s(b, d);
  return out;
}

SpinEigenbasis collective_eigenbasis(double phi) {
  const cd e = std::polar(1.0, phi);
  const Eigen::Vector2cd plus = Eigen::Vector2cd(1.0, e) / std::sqrt(2.0);
  const Eigen::Vector2cd minus = Eigen::Vector2cd(1.0, -e) / std::sqrt(2.0);
  auto kron = [](const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
    SpinVector v;
    v << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
    return v;
  };
  SpinEigenbasis eb;
  eb.eigenvalue = {2.0, -2.0, 0.0, 0.0};
  eb.vector = {kron(plus, plus), kron(minus, minus), kron(plus, minus), kron(minus, plus)};
  return eb;
}

SpinMatrix ideal_gate(double theta, double phi) {
  const SpinEigenbasis eb = collective_eigenbasis(phi);
  SpinMatrix u = SpinMatrix::Zero();
  for (int k = 0; k < 4; ++k) {
    const double s = eb.eigenvalue[k];
    u += std::polar(1.0, theta * s * s / 4.0) * eb.vector[k] * eb.vector[k].adjoint();
  }
  return u;
}

SpinVector basis_state(SpinIndex i) {
  SpinVector v = SpinVector::Zero();
  v(i) = 1.0;
  return v;
}

SpinStateVariances spin_variances(const SpinVector& psi0, double basis_phase) {
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw ParameterError("spin_variances: state is not normalized");
  const SpinMatrix s = collective_spin(basis_phase);
  const SpinMatrix s2 = s * s;
  const SpinMatrix s4 = s2 * s2;
  SpinStateVariances v;
  v.mean_S = psi0.dot(s * psi0).real();
  v.mean_S2 = psi0.dot(s2 * psi0).real();
  const double mean_s4 = psi0.dot(s4 * psi0).real();
  v.lambda_S_sq = std::max(0.0, v.mean_S2 - v.mean_S * v.mean_S);
  v.lambda_S2_sq = std::max(0.0, mean_s4 - v.mean_S2 * v.mean_S2);
  return v;
}

SpinStateVariances default_variances() { return spin_variances(basis_state(kUpUp), 0.0); }

}  // namespace smoothgate
