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

#pragma once

// Qubit/operator algebra and numerical calculus on the Bloch ball.
//
// Conventions: density matrices carry the standard trace Tr(rho) = 1 and the
// qubit state rho = (I + r.sigma)/2 is stored as its Bloch vector r. The
// pairing <rho, X> used by the control layer is the normalized-trace pairing
// tr(rho X) with tr = Tr/d applied to states normalized to tr(rho) = 1; for a
// standard-trace density matrix this is exactly Tr(rho X), the expectation of
// X. Gradients are taken with respect to r (the q = -r parametrization only
// shows up as a sign at the costate boundary, see control.hpp).

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace qdp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CMatrix2 = Eigen::Matrix2cd;

/// Slack allowed on |r| <= 1 before a vector is rejected as unphysical.
inline constexpr double kBallTolerance = 1e-9;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-10;

inline constexpr double kGradientStep = 1e-5;
inline constexpr double kHessianStep = 1e-4;

class BlochState {
 public:
  BlochState() = default;
  /// Throws InvalidArgument when |r| > 1 + kBallTolerance.
  explicit BlochState(const Vec3& r);

  const Vec3& vec() const { return r_; }
  double x() const { return r_.x(); }
  double y() const { return r_.y(); }
  double z() const { return r_.z(); }
  double norm() const { return r_.norm(); }
  /// 1 - |r|^2; zero exactly for pure states.
  double purity_deficit() const { return 1.0 - r_.squaredNorm(); }

 private:
  Vec3 r_ = Vec3::Zero();
};

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity.
  explicit DensityMatrix(CMatrix rho);

  const CMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }

 private:
  CMatrix rho_;
};

class Observable {
 public:
  explicit Observable(CMatrix x);

  static Observable identity(Eigen::Index d);
  static Observable zero(Eigen::Index d);
  /// c I + v.sigma
  static Observable qubit(double scalar, const Vec3& v);

  const CMatrix& matrix() const { return x_; }
  Eigen::Index dim() const { return x_.rows(); }

  /// Scalar part c of X = c I + v.sigma (qubit only).
  double qubit_scalar() const;
  /// Vector part v of X = c I + v.sigma (qubit only).
  Vec3 qubit_vector() const;

 private:
  CMatrix x_;
};

const CMatrix2& pauli(int axis);
/// v.sigma
CMatrix2 sigma_dot(const Vec3& v);

DensityMatrix bloch_to_density(const Vec3& r);
Vec3 density_to_bloch(const DensityMatrix& rho);
/// Bloch components of an arbitrary 2x2 matrix A: Re Tr(sigma_i A).
Vec3 bloch_components(const CMatrix& a);

double pairing(const BlochState& state, const Observable& obs);
double pairing(const DensityMatrix& state, const Observable& obs);
/// Pairing of a trace-class matrix (a state or a generator rate) with X.
double pairing(const CMatrix& a, const Observable& obs);

/// g(|r|) together with its first two radial derivatives.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;
};

/// Scalar functional of the qubit state. Evaluation accepts any 3-vector so
/// that finite-difference stencils may touch points within O(h^2) of the ball.
struct StateFunctional {
  std::string name;
  std::function<double(const Vec3&)> eval;
  std::function<Vec3(const Vec3&)> gradient;  // optional closed form
  std::function<Mat3(const Vec3&)> hessian;   // optional closed form
  std::optional<RadialProfile> radial;        // set when f depends on |r| only

  double operator()(const Vec3& r) const { return eval(r); }
  bool is_radial() const { return radial.has_value(); }
};

namespace functional {

/// 1 - |r|^2
StateFunctional purity_deficit();
StateFunctional constant(double c);
/// r_axis
StateFunctional coordinate(int axis);
/// g(|r|) with closed-form gradient and Hessian built from the profile.
StateFunctional radial(std::string name, RadialProfile profile);
/// -|P r| for the projection P onto the listed axes: the concave bequest
/// obtained by minimizing <rho, sigma_u> over the unit ball of controls.
StateFunctional negative_projected_length(std::array<bool, 3> axes);
/// <rho, X> for a fixed qubit observable.
StateFunctional expectation(const Observable& obs);

}  // namespace functional

/// Central differences along the three Bloch axes (one-sided, second order,
/// pointing inward where the stencil would leave the ball). h in [1e-7, 1e-3].
Vec3 grad_fd(const StateFunctional& f, const Vec3& r, double h = kGradientStep);
/// Second-order finite-difference Hessian, symmetrized.
Mat3 hessian_fd(const StateFunctional& f, const Vec3& r, double h = kHessianStep);

/// Closed-form gradient when available, otherwise grad_fd.
Vec3 gradient_of(const StateFunctional& f, const Vec3& r);
/// Closed-form Hessian when available, otherwise hessian_fd.
Mat3 hessian_of(const StateFunctional& f, const Vec3& r);

}  // namespace qdp
