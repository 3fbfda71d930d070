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

// Node restriction, spectral shifts and the convex relaxation builders.
//
// A spectral relaxation adds alpha * (x - l)'(x - u) <= 0 to the objective,
// which underestimates it on the box and is convex once alpha offsets the
// most negative eigenvalue of the relevant pencil:
//
//   EIG          lambda_min(Q)
//   GEIG         lambda_min(Q, I + A'A), plus alpha * ||Ax - b||^2
//   EIGZ_EXACT   lambda_min(Z'QZ), Z an orthonormal basis of null(A)
//   EIGZ_APPROX  lambda_min(Q, I + delta A'A) for a large delta

#ifndef SMIQP_RELAXATION_HPP
#define SMIQP_RELAXATION_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smiqp/convex_model.hpp"
#include "smiqp/linalg.hpp"
#include "smiqp/problem.hpp"
#include "smiqp/qpsolve.hpp"

namespace smiqp {

enum class ShiftKind { kEig, kGeig, kEigzExact, kEigzApprox };

std::string to_string(ShiftKind kind);

struct DeltaStep {
  double delta = 0.0;
  double lambda = 0.0;
};

struct SpectralShift {
  ShiftKind kind = ShiftKind::kEig;
  double alpha = 0.0;       ///< max(0, -lambda_raw)
  double delta = 1.0;
  VectorXd eigvec;          ///< over the node's free variables
  double lambda_raw = 0.0;
  std::vector<DeltaStep> history;  ///< delta search iterates (EIGZ_APPROX only)
};

struct DeltaParams {
  double sigma = 10.0;
  int max_iter = 5;
  double rel_tol = 1e-3;
};

/// Free/fixed split of a node. `lower`/`upper` are indexed like `free`.
struct NodeRestriction {
  std::vector<int> free;
  std::vector<int> fixed;
  VectorXd fixed_values;
  VectorXd lower;
  VectorXd upper;
};

/// Variables with lo(i) == hi(i) are fixed at that value.
NodeRestriction make_restriction(const VectorXd& lo, const VectorXd& hi);

/// Problem data over the free variables with fixed values substituted.
/// `constant` includes the problem's objective offset.
struct RestrictedProblem {
  std::vector<int> free;
  SymMatrix Q;
  VectorXd q;
  MatrixXd A;
  VectorXd b;
  MatrixXd C;
  VectorXd d;
  VectorXd lower;
  VectorXd upper;
  double constant = 0.0;

  int n() const { return static_cast<int>(free.size()); }
  double objective(const VectorXd& xb) const {
    return xb.dot(Q.dense() * xb) + q.dot(xb) + constant;
  }
};

RestrictedProblem restrict(const Problem& problem, const NodeRestriction& node);

/// Full-length point from free values and the node's fixed values.
VectorXd expand_point(const NodeRestriction& node, const VectorXd& x_free, int n);

SpectralShift compute_shift_eig(const SymMatrix& Q);
SpectralShift compute_shift_geig(const SymMatrix& Q, const MatrixXd& A);
SpectralShift compute_shift_eigz_exact(const SymMatrix& Q, const MatrixXd& A);

/// Geometric delta search: delta_0 = 1, delta_{k+1} = sigma * delta_k, stop
/// when the relative change of lambda is <= rel_tol or after max_iter
/// evaluations.
SpectralShift compute_shift_eigz_approx(const SymMatrix& Q, const MatrixXd& A,
                                        const DeltaParams& params = {});

/// EIGZ_APPROX shift at a given delta (no search).
SpectralShift compute_shift_at_delta(const SymMatrix& Q, const MatrixXd& A, double delta);

/// Spectral model over the free variables. GEIG keeps the alpha * ||Ax - b||^2
/// term; the other kinds drop it, and EIGZ kinds with equality rows are
/// flagged nullspace-convex.
ConvexQpModel build_spectral_relaxation(const RestrictedProblem& r, const SpectralShift& shift);

/// The continuous relaxation itself (alpha = 0).
ConvexQpModel build_plain_relaxation(const RestrictedProblem& r, bool nullspace_convex);

/// Secant of x^2 over [l, u]: returns (slope, offset) = (l + u, -l u).
std::pair<double, double> envelope_concave_square(double l, double u);

/// Lifted LP with a product column X_ij for every pair i <= j with
/// Q_ij != 0, bounded by the McCormick inequalities.
ConvexQpModel build_mccormick_relaxation(const RestrictedProblem& r);

/// (x, X) with X_ij = x_i x_j, the exact lift of a point into a McCormick model.
VectorXd lift_point(const ConvexQpModel& mccormick, const VectorXd& x);

using LpSolver = std::function<QpSolution(const ConvexQpModel&)>;

/// Eigen-decomposes Q = sum lambda_k v_k v_k'. Positive directions keep
/// lambda_k (v_k'x)^2; negative directions are replaced by the secant of
/// y_k^2 over [L_k, U_k], the range of v_k'x over the node's feasible set.
/// Returns nullopt when an LP proves the node infeasible.
std::optional<ConvexQpModel> build_separable_relaxation(const RestrictedProblem& r,
                                                        const LpSolver& lp_solve);

}  // namespace smiqp

#endif  // SMIQP_RELAXATION_HPP
