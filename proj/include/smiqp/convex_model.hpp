// Copyright 2026 The spectral-miqp Authors
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

#ifndef SMIQP_CONVEX_MODEL_HPP
#define SMIQP_CONVEX_MODEL_HPP

#include <vector>

#include <Eigen/Dense>

namespace smiqp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Lifted product column X_ij (i <= j, indices into the x block).
struct LiftedColumn {
  int i = 0;
  int j = 0;
};

/// A convex relaxation
///
///   min  v'Qv + q'v + constant
///   s.t. Av = b, Cv <= d, lower <= v <= upper
///
/// where v = (x, X): the first `num_x` entries are node variables and the
/// rest are lifted product columns described by `lifted`.
struct ConvexQpModel {
  MatrixXd Q;
  VectorXd q;
  double constant = 0.0;
  MatrixXd A;
  VectorXd b;
  MatrixXd C;
  VectorXd d;
  VectorXd lower;
  VectorXd upper;
  /// Q is only guaranteed convex on null(A); the solver must work in
  /// reduced coordinates.
  bool nullspace_convex = false;
  int num_x = 0;
  std::vector<LiftedColumn> lifted;

  int n() const { return static_cast<int>(q.size()); }
  bool is_lp() const { return Q.size() == 0 || Q.isZero(0.0); }
  double objective(const VectorXd& v) const { return v.dot(Q * v) + q.dot(v) + constant; }
};

}  // namespace smiqp

#endif  // SMIQP_CONVEX_MODEL_HPP
