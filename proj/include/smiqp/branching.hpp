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

// Branching variable selection. The spectral rules rank a binary candidate
// by how much fixing it raises lambda_min of the remaining submatrix: fixing
// x_i deletes row/column i of Q.
//
// Candidate sets are given as original indices in ascending order; the i-th
// row of the node matrix corresponds to candidates[i]. Ties always go to
// the lowest original index.

#ifndef SMIQP_BRANCHING_HPP
#define SMIQP_BRANCHING_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smiqp/linalg.hpp"
#include "smiqp/relaxation.hpp"

namespace smiqp {

enum class BranchKind { kBinaryFix, kIntegerSplit, kSpatialSplit };

struct BranchDecision {
  int variable = -1;  ///< original index
  BranchKind kind = BranchKind::kBinaryFix;
  double split = 0.0; ///< left child gets x <= split (integer: floor(split))
  std::string rule;
};

/// argmax_i lambda_min(Q with row/column i deleted). O(|B|^4) with Jacobi.
int spectral_branch_exact(const SymMatrix& Q, std::span<const int> candidates);

/// argmax_i of the Gershgorin bound of the deleted submatrix, in O(|B|^2)
/// without forming any submatrix.
int spectral_branch_gct(const SymMatrix& Q, std::span<const int> candidates);

/// Gershgorin bound of Q with row/column k (position) deleted.
double gct_deleted_bound(const SymMatrix& Q, int k);

/// argmax_i |v_i| over the eigenvector of the node's spectral shift.
int spectral_branch_approx(const VectorXd& eigvec, std::span<const int> candidates);

/// lambda_min after each single deletion, with the best (largest) and worst
/// (smallest) positions; ties to the lowest position.
struct DeletionProfile {
  VectorXd lambda;
  int best = 0;
  int worst = 0;
};

DeletionProfile deletion_profile(const SymMatrix& Q);

/// 100 * (lambda(choice) - lambda(best)) / (lambda(worst) - lambda(best)),
/// 0 when best and worst are within 1e-12. `choice` is a position.
double branching_gap_metric(const DeletionProfile& profile, int choice);
double branching_gap_metric(const SymMatrix& Q, int choice);

inline constexpr double kSpatialTheta = 0.2;

/// Picks the candidate maximizing (|Q_ii| + alpha) times the envelope slack
/// (l + u) x - l u - x^2 at the relaxation point and splits at x clamped to
/// [l + theta w, u - theta w]. `candidates` are positions into r.free.
/// nullopt when no score is positive.
std::optional<BranchDecision> spatial_branch(const RestrictedProblem& r, const VectorXd& x,
                                             double alpha, std::span<const int> candidates);

/// Position (into r.free) of the most fractional candidate; nullopt when all
/// are within int_tol of an integer.
std::optional<int> most_fractional_branch(const VectorXd& x, std::span<const int> candidates,
                                          double int_tol = 1e-6);

}  // namespace smiqp

#endif  // SMIQP_BRANCHING_HPP
