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

// Dense symmetric linear algebra used to build spectral shifts and to rank
// branching candidates. Everything here is O(t^3) in the matrix order t and
// meant for the small-to-medium dense matrices arising at tree nodes.

#ifndef SMIQP_LINALG_HPP
#define SMIQP_LINALG_HPP

#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace smiqp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kEigTol = 1e-10;
inline constexpr double kRankTol = 1e-10;
inline constexpr double kPivotTol = 1e-12;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky breakdown. `pivot()` is the 0-based index of the first pivot
/// that was <= kPivotTol.
class NotPositiveDefinite : public LinalgError {
 public:
  explicit NotPositiveDefinite(int pivot);
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

/// Real symmetric matrix. Symmetric by construction: every factory either
/// mirrors a triangle or averages with the transpose.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int order) : m_(MatrixXd::Zero(order, order)) {}

  static SymMatrix from_lower(const MatrixXd& m);
  static SymMatrix symmetrized(const MatrixXd& m);
  static SymMatrix identity(int order);
  static SymMatrix diagonal(const VectorXd& d);

  int order() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const MatrixXd& dense() const { return m_; }
  bool all_finite() const { return m_.allFinite(); }
  double norm_inf() const;

  /// Sets (i, j) and (j, i).
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

 private:
  MatrixXd m_;
};

struct EigenPair {
  double value = 0.0;
  VectorXd vector;  ///< unit 2-norm, first nonzero component positive
};

/// Full spectrum, eigenvalues ascending with matching eigenvector columns.
struct SymEigen {
  VectorXd values;
  MatrixXd vectors;
};

/// Cyclic Jacobi eigendecomposition.
SymEigen sym_eig(const SymMatrix& m);

/// Eigenvalues only (ascending); skips eigenvector accumulation.
VectorXd sym_eigenvalues(const SymMatrix& m);

/// Smallest eigenpair via cyclic Jacobi. Throws LinalgError on non-finite
/// entries or an empty matrix.
EigenPair sym_eig_min(const SymMatrix& m);

/// Lower-triangular L with L L' = N.
MatrixXd cholesky(const SymMatrix& n);

/// Smallest eigenpair of M v = lambda N v for N positive definite, by
/// Cholesky reduction to L^-1 M L^-T. The returned vector is renormalized
/// to unit 2-norm.
EigenPair gen_eig_min(const SymMatrix& m, const SymMatrix& n);

/// Orthonormal basis (as columns) of null(A). Rank is decided by column
/// pivoted QR of A' with a relative pivot threshold. A with zero rows
/// yields the identity.
MatrixXd nullspace_basis(const MatrixXd& a, double rank_tol = kRankTol);

/// min_k (T_kk - sum_{l != k} |T_kl|), a lower bound on lambda_min(T).
double gct_lower_bound(const SymMatrix& t);

/// Removes row and column `k` (0-based). Requires order >= 2.
SymMatrix submatrix_delete(const SymMatrix& t, int k);

/// Principal submatrix on the given (0-based) indices, in that order.
SymMatrix principal_submatrix(const SymMatrix& t, std::span<const int> indices);

/// Flips `v` so its first component with |v_i| > 1e-14 is positive.
void normalize_sign(VectorXd& v);

}  // namespace smiqp

#endif  // SMIQP_LINALG_HPP
