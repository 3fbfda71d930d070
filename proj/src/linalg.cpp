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

#include "smiqp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

namespace smiqp {
namespace {

constexpr int kMaxSweeps = 100;

void require_usable(const SymMatrix& m) {
  if (m.order() < 1) throw LinalgError("eigensolve of an empty matrix");
  if (!m.all_finite()) throw LinalgError("matrix has non-finite entries");
}

// One cyclic Jacobi run on `a` (overwritten; diagonal holds the eigenvalues
// on exit). When `v` is non-null the rotations are accumulated into it.
void jacobi(MatrixXd& a, MatrixXd* v) {
  const Eigen::Index t = a.rows();
  if (v != nullptr) v->setIdentity(t, t);
  if (t == 1) return;
  const double frob2 = a.squaredNorm();
  if (frob2 == 0.0) return;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index q = 1; q < t; ++q) {
      for (Eigen::Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    }
    if (off <= 1e-32 * frob2) break;

    for (Eigen::Index p = 0; p < t - 1; ++p) {
      for (Eigen::Index q = p + 1; q < t; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Skip rotations that cannot change the diagonal in floating point.
        if (sweep > 3 && std::abs(apq) * 1e18 < std::min(std::abs(app), std::abs(aqq))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double tan = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tan * tan + 1.0);
        const double s = tan * c;

        a(p, p) = app - tan * apq;
        a(q, q) = aqq + tan * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < t; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double np = c * akp - s * akq;
          const double nq = s * akp + c * akq;
          a(k, p) = np;
          a(p, k) = np;
          a(k, q) = nq;
          a(q, k) = nq;
        }
        if (v != nullptr) {
          for (Eigen::Index k = 0; k < t; ++k) {
            const double vkp = (*v)(k, p);
            const double vkq = (*v)(k, q);
            (*v)(k, p) = c * vkp - s * vkq;
            (*v)(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
}

}  // namespace

NotPositiveDefinite::NotPositiveDefinite(int pivot)
    : LinalgError(fmt::format("matrix is not positive definite (pivot {})", pivot + 1)),
      pivot_(pivot) {}

SymMatrix SymMatrix::from_lower(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw LinalgError("SymMatrix requires a square matrix");
  SymMatrix s;
  s.m_ = m.selfadjointView<Eigen::Lower>();
  return s;
}

SymMatrix SymMatrix::symmetrized(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw LinalgError("SymMatrix requires a square matrix");
  SymMatrix s;
  s.m_ = 0.5 * (m + m.transpose());
  return s;
}

SymMatrix SymMatrix::identity(int order) {
  SymMatrix s;
  s.m_ = MatrixXd::Identity(order, order);
  return s;
}

SymMatrix SymMatrix::diagonal(const VectorXd& d) {
  SymMatrix s;
  s.m_ = d.asDiagonal();
  return s;
}

double SymMatrix::norm_inf() const {
  if (m_.size() == 0) return 0.0;
  return m_.cwiseAbs().rowwise().sum().maxCoeff();
}

void normalize_sign(VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-14) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

SymEigen sym_eig(const SymMatrix& m) {
  require_usable(m);
  MatrixXd a = m.dense();
  MatrixXd v;
  jacobi(a, &v);

  const auto t = static_cast<int>(a.rows());
  std::vector<int> order(static_cast<std::size_t>(t));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

  SymEigen out;
  out.values.resize(t);
  out.vectors.resize(t, t);
  for (int k = 0; k < t; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    VectorXd col = v.col(src);
    col.normalize();
    normalize_sign(col);
    out.vectors.col(k) = col;
  }
  return out;
}

VectorXd sym_eigenvalues(const SymMatrix& m) {
  require_usable(m);
  MatrixXd a = m.dense();
  jacobi(a, nullptr);
  VectorXd values = a.diagonal();
  std::sort(values.data(), values.data() + values.size());
  return values;
}

EigenPair sym_eig_min(const SymMatrix& m) {
  require_usable(m);
  MatrixXd a = m.dense();
  MatrixXd v;
  jacobi(a, &v);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < a.rows(); ++i) {
    if (a(i, i) < a(best, best)) best = i;
  }
  EigenPair pair{a(best, best), v.col(best)};
  pair.vector.normalize();
  normalize_sign(pair.vector);
  return pair;
}

MatrixXd cholesky(const SymMatrix& n) {
  if (!n.all_finite()) throw LinalgError("matrix has non-finite entries");
  const int t = n.order();
  MatrixXd l = MatrixXd::Zero(t, t);
  for (int j = 0; j < t; ++j) {
    double pivot = n(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > kPivotTol)) throw NotPositiveDefinite(j);
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (int i = j + 1; i < t; ++i) {
      l(i, j) = (n(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
    }
  }
  return l;
}

EigenPair gen_eig_min(const SymMatrix& m, const SymMatrix& n) {
  if (m.order() != n.order()) throw LinalgError("generalized eigenproblem with mismatched orders");
  require_usable(m);
  const MatrixXd l = cholesky(n);
  const auto lower = l.triangularView<Eigen::Lower>();
  // C = L^-1 M L^-T
  const MatrixXd x = lower.solve(m.dense());
  const MatrixXd c = lower.solve(x.transpose());
  const EigenPair reduced = sym_eig_min(SymMatrix::symmetrized(c));

  EigenPair pair;
  pair.value = reduced.value;
  pair.vector = l.transpose().triangularView<Eigen::Upper>().solve(reduced.vector);
  pair.vector.normalize();
  normalize_sign(pair.vector);
  return pair;
}

MatrixXd nullspace_basis(const MatrixXd& a, double rank_tol) {
  const auto n = a.cols();
  if (a.rows() == 0 || a.isZero(0.0)) return MatrixXd::Identity(n, n);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a.transpose());
  qr.setThreshold(rank_tol);
  const auto rank = qr.rank();
  if (rank >= n) return MatrixXd(n, 0);
  const MatrixXd q = qr.householderQ();
  MatrixXd z = q.rightCols(n - rank);
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    VectorXd col = z.col(c);
    normalize_sign(col);
    z.col(c) = col;
  }
  return z;
}

double gct_lower_bound(const SymMatrix& t) {
  if (t.order() < 1) throw LinalgError("Gershgorin bound of an empty matrix");
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < t.order(); ++k) {
    const double radius = t.dense().row(k).cwiseAbs().sum() - std::abs(t(k, k));
    best = std::min(best, t(k, k) - radius);
  }
  return best;
}

SymMatrix submatrix_delete(const SymMatrix& t, int k) {
  const int order = t.order();
  if (order < 2) throw LinalgError("cannot delete from a matrix of order < 2");
  if (k < 0 || k >= order) {
    throw LinalgError(fmt::format("deletion index {} out of range for order {}", k, order));
  }
  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(order - 1));
  for (int i = 0; i < order; ++i) {
    if (i != k) keep.push_back(i);
  }
  return principal_submatrix(t, keep);
}

SymMatrix principal_submatrix(const SymMatrix& t, std::span<const int> indices) {
  const auto k = static_cast<int>(indices.size());
  SymMatrix out(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) out.set(i, j, t(indices[static_cast<std::size_t>(i)],
                                                 indices[static_cast<std::size_t>(j)]));
  }
  return out;
}

}  // namespace smiqp
