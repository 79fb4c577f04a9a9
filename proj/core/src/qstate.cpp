// Copyright 2026 The qdp Authors
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

#include "qdp/qstate.hpp"

#include <cmath>
#include <utility>

#include "qdp/error.hpp"

namespace qdp {

namespace {

const std::array<CMatrix2, 3>& pauli_matrices() {
  static const std::array<CMatrix2, 3> m = [] {
    std::array<CMatrix2, 3> p;
    const Complex i(0.0, 1.0);
    p[0] << 0.0, 1.0, 1.0, 0.0;
    p[1] << 0.0, -i, i, 0.0;
    p[2] << 1.0, 0.0, 0.0, -1.0;
    return p;
  }();
  return m;
}

bool is_hermitian(const CMatrix& a, double tol) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// One axis of a finite-difference stencil: integer offsets (in units of h)
// and their weights.
struct AxisStencil {
  std::array<int, 4> offsets{};
  std::array<double, 4> weights{};
  int size = 0;
};

// The stencil leaves the ball to first order along axis i when the linear
// part of |r + h e_i|^2 - 1 is positive; tangent directions stay central.
int inward_sign(const Vec3& r, int axis, double h) {
  const double excess = r.squaredNorm() + 2.0 * h * std::abs(r[axis]) - 1.0;
  if (excess > kBallTolerance && r[axis] != 0.0) {
    return r[axis] > 0.0 ? -1 : 1;
  }
  return 0;
}

AxisStencil first_derivative_stencil(int sign, double h) {
  AxisStencil s;
  if (sign == 0) {
    s.size = 2;
    s.offsets = {-1, 1, 0, 0};
    s.weights = {-0.5 / h, 0.5 / h, 0.0, 0.0};
  } else {
    s.size = 3;
    s.offsets = {0, sign, 2 * sign, 0};
    const double inv = 1.0 / (sign * h);
    s.weights = {-1.5 * inv, 2.0 * inv, -0.5 * inv, 0.0};
  }
  return s;
}

AxisStencil second_derivative_stencil(int sign, double h) {
  AxisStencil s;
  const double inv = 1.0 / (h * h);
  if (sign == 0) {
    s.size = 3;
    s.offsets = {-1, 0, 1, 0};
    s.weights = {inv, -2.0 * inv, inv, 0.0};
  } else {
    s.size = 4;
    s.offsets = {0, sign, 2 * sign, 3 * sign};
    s.weights = {2.0 * inv, -5.0 * inv, 4.0 * inv, -1.0 * inv};
  }
  return s;
}

void check_step(double h, double lo, double hi) {
  if (!(h >= lo && h <= hi)) {
    throw InvalidArgument("finite-difference step " + std::to_string(h) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

BlochState::BlochState(const Vec3& r) : r_(r) {
  if (!r.allFinite() || r.norm() > 1.0 + kBallTolerance) {
    throw InvalidArgument("Bloch vector outside the unit ball");
  }
}

DensityMatrix::DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) {
    throw DimensionMismatch("density matrix must be square and non-empty");
  }
  if (!is_hermitian(rho_, kHermitianTolerance)) {
    throw InvalidArgument("density matrix is not Hermitian");
  }
  if (std::abs(rho_.trace() - Complex(1.0, 0.0)) > kTraceTolerance) {
    throw InvalidArgument("density matrix trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kPositivityTolerance) {
    throw InvalidArgument("density matrix has a negative eigenvalue");
  }
}

Observable::Observable(CMatrix x) : x_(std::move(x)) {
  if (x_.rows() == 0 || x_.rows() != x_.cols()) {
    throw DimensionMismatch("observable must be square and non-empty");
  }
  if (!is_hermitian(x_, kHermitianTolerance)) {
    throw InvalidArgument("observable is not Hermitian");
  }
}

Observable Observable::identity(Eigen::Index d) { return Observable(CMatrix::Identity(d, d)); }

Observable Observable::zero(Eigen::Index d) { return Observable(CMatrix::Zero(d, d)); }

Observable Observable::qubit(double scalar, const Vec3& v) {
  CMatrix x = scalar * CMatrix2::Identity() + sigma_dot(v);
  return Observable(std::move(x));
}

double Observable::qubit_scalar() const {
  if (dim() != 2) throw DimensionMismatch("qubit_scalar needs a 2x2 observable");
  return 0.5 * x_.trace().real();
}

Vec3 Observable::qubit_vector() const {
  if (dim() != 2) throw DimensionMismatch("qubit_vector needs a 2x2 observable");
  return 0.5 * bloch_components(x_);
}

const CMatrix2& pauli(int axis) { return pauli_matrices().at(static_cast<std::size_t>(axis)); }

CMatrix2 sigma_dot(const Vec3& v) {
  const auto& p = pauli_matrices();
  return v.x() * p[0] + v.y() * p[1] + v.z() * p[2];
}

DensityMatrix bloch_to_density(const Vec3& r) {
  const BlochState checked(r);
  CMatrix rho = 0.5 * (CMatrix2::Identity() + sigma_dot(checked.vec()));
  return DensityMatrix(std::move(rho));
}

Vec3 density_to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionMismatch("Bloch form exists for qubits only");
  return bloch_components(rho.matrix());
}

Vec3 bloch_components(const CMatrix& a) {
  if (a.rows() != 2 || a.cols() != 2) throw DimensionMismatch("expected a 2x2 matrix");
  const auto& p = pauli_matrices();
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = (p[static_cast<std::size_t>(i)] * a).trace().real();
  return v;
}

double pairing(const BlochState& state, const Observable& obs) {
  if (obs.dim() != 2) throw DimensionMismatch("Bloch state paired with a non-qubit observable");
  return obs.qubit_scalar() + state.vec().dot(obs.qubit_vector());
}

double pairing(const DensityMatrix& state, const Observable& obs) {
  return pairing(state.matrix(), obs);
}

double pairing(const CMatrix& a, const Observable& obs) {
  if (a.rows() != obs.dim() || a.cols() != obs.dim()) {
    throw DimensionMismatch("pairing operands have different dimensions");
  }
  return (a * obs.matrix()).trace().real();
}

namespace functional {

StateFunctional purity_deficit() {
  StateFunctional f;
  f.name = "purity_deficit";
  f.eval = [](const Vec3& r) { return 1.0 - r.squaredNorm(); };
  f.gradient = [](const Vec3& r) -> Vec3 { return -2.0 * r; };
  f.hessian = [](const Vec3&) -> Mat3 { return -2.0 * Mat3::Identity(); };
  f.radial = RadialProfile{[](double s) { return 1.0 - s * s; }, [](double s) { return -2.0 * s; },
                           [](double) { return -2.0; }};
  return f;
}

StateFunctional constant(double c) {
  StateFunctional f;
  f.name = "constant";
  f.eval = [c](const Vec3&) { return c; };
  f.gradient = [](const Vec3&) -> Vec3 { return Vec3::Zero(); };
  f.hessian = [](const Vec3&) -> Mat3 { return Mat3::Zero(); };
  f.radial = RadialProfile{[c](double) { return c; }, [](double) { return 0.0; },
                           [](double) { return 0.0; }};
  return f;
}

StateFunctional coordinate(int axis) {
  if (axis < 0 || axis > 2) throw InvalidArgument("coordinate axis must be 0, 1 or 2");
  StateFunctional f;
  f.name = std::string(1, "xyz"[axis]);
  f.eval = [axis](const Vec3& r) { return r[axis]; };
  f.gradient = [axis](const Vec3&) -> Vec3 { return Vec3::Unit(axis); };
  f.hessian = [](const Vec3&) -> Mat3 { return Mat3::Zero(); };
  return f;
}

StateFunctional radial(std::string name, RadialProfile profile) {
  StateFunctional f;
  f.name = std::move(name);
  f.eval = [g = profile.value](const Vec3& r) { return g(r.norm()); };
  f.gradient = [dg = profile.first](const Vec3& r) -> Vec3 {
    const double s = r.norm();
    if (s < 1e-14) return Vec3::Zero();
    return dg(s) / s * r;
  };
  f.hessian = [dg = profile.first, d2g = profile.second](const Vec3& r) -> Mat3 {
    const double s = r.norm();
    if (s < 1e-14) return d2g(0.0) * Mat3::Identity();
    const Vec3 u = r / s;
    const Mat3 radial_part = u * u.transpose();
    return dg(s) / s * (Mat3::Identity() - radial_part) + d2g(s) * radial_part;
  };
  f.radial = std::move(profile);
  return f;
}

StateFunctional negative_projected_length(std::array<bool, 3> axes) {
  Mat3 p = Mat3::Zero();
  for (int i = 0; i < 3; ++i) p(i, i) = axes[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  StateFunctional f;
  f.name = "negative_projected_length";
  f.eval = [p](const Vec3& r) { return -(p * r).norm(); };
  f.gradient = [p](const Vec3& r) -> Vec3 {
    const Vec3 pr = p * r;
    const double n = pr.norm();
    if (n < 1e-14) return Vec3::Zero();
    return -pr / n;
  };
  return f;
}

StateFunctional expectation(const Observable& obs) {
  const double c = obs.qubit_scalar();
  const Vec3 v = obs.qubit_vector();
  StateFunctional f;
  f.name = "expectation";
  f.eval = [c, v](const Vec3& r) { return c + r.dot(v); };
  f.gradient = [v](const Vec3&) -> Vec3 { return v; };
  f.hessian = [](const Vec3&) -> Mat3 { return Mat3::Zero(); };
  return f;
}

}  // namespace functional

Vec3 grad_fd(const StateFunctional& f, const Vec3& r, double h) {
  check_step(h, 1e-7, 1e-3);
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    const AxisStencil s = first_derivative_stencil(inward_sign(r, i, h), h);
    double acc = 0.0;
    for (int k = 0; k < s.size; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      acc += s.weights[ku] * f(r + s.offsets[ku] * h * Vec3::Unit(i));
    }
    g[i] = acc;
  }
  return g;
}

Mat3 hessian_fd(const StateFunctional& f, const Vec3& r, double h) {
  check_step(h, 1e-7, 1e-3);
  std::array<int, 3> sign{};
  for (int i = 0; i < 3; ++i) sign[static_cast<std::size_t>(i)] = inward_sign(r, i, h);

  Mat3 hess = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    const AxisStencil s = second_derivative_stencil(sign[static_cast<std::size_t>(i)], h);
    double acc = 0.0;
    for (int k = 0; k < s.size; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      acc += s.weights[ku] * f(r + s.offsets[ku] * h * Vec3::Unit(i));
    }
    hess(i, i) = acc;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const AxisStencil si = first_derivative_stencil(sign[static_cast<std::size_t>(i)], h);
      const AxisStencil sj = first_derivative_stencil(sign[static_cast<std::size_t>(j)], h);
      double acc = 0.0;
      for (int a = 0; a < si.size; ++a) {
        for (int b = 0; b < sj.size; ++b) {
          const auto au = static_cast<std::size_t>(a);
          const auto bu = static_cast<std::size_t>(b);
          const Vec3 p = r + si.offsets[au] * h * Vec3::Unit(i) + sj.offsets[bu] * h * Vec3::Unit(j);
          acc += si.weights[au] * sj.weights[bu] * f(p);
        }
      }
      hess(i, j) = acc;
      hess(j, i) = acc;
    }
  }
  return hess;
}

Vec3 gradient_of(const StateFunctional& f, const Vec3& r) {
  return f.gradient ? f.gradient(r) : grad_fd(f, r);
}

Mat3 hessian_of(const StateFunctional& f, const Vec3& r) {
  return f.hessian ? f.hessian(r) : hessian_fd(f, r);
}

}  // namespace qdp
