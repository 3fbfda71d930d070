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

#include "smiqp/branching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace smiqp {
namespace {

constexpr double kTieRel = 1e-12;

void require_candidates(const SymMatrix& Q, std::span<const int> candidates) {
  if (candidates.size() < 2) throw std::invalid_argument("spectral branching needs at least two candidates");
  if (static_cast<int>(candidates.size()) != Q.order()) {
    throw std::invalid_argument("candidate list does not match the matrix order");
  }
}

// Strictly better by more than the tie tolerance.
bool better(double value, double incumbent) {
  return value > incumbent + kTieRel * (1.0 + std::abs(incumbent));
}

}  // namespace

DeletionProfile deletion_profile(const SymMatrix& Q) {
  const int t = Q.order();
  if (t < 2) throw std::invalid_argument("deletion profile needs order >= 2");
  DeletionProfile p;
  p.lambda.resize(t);
  for (int k = 0; k < t; ++k) p.lambda(k) = sym_eigenvalues(submatrix_delete(Q, k))(0);
  for (int k = 1; k < t; ++k) {
    if (better(p.lambda(k), p.lambda(p.best))) p.best = k;
    if (better(-p.lambda(k), -p.lambda(p.worst))) p.worst = k;
  }
  return p;
}

int spectral_branch_exact(const SymMatrix& Q, std::span<const int> candidates) {
  require_candidates(Q, candidates);
  return candidates[static_cast<std::size_t>(deletion_profile(Q).best)];
}

double gct_deleted_bound(const SymMatrix& Q, int k) {
  const int t = Q.order();
  double bound = std::numeric_limits<double>::infinity();
  for (int row = 0; row < t; ++row) {
    if (row == k) continue;
    double radius = 0.0;
    for (int col = 0; col < t; ++col) {
      if (col != row && col != k) radius += std::abs(Q(row, col));
    }
    bound = std::min(bound, Q(row, row) - radius);
  }
  return bound;
}

int spectral_branch_gct(const SymMatrix& Q, std::span<const int> candidates) {
  require_candidates(Q, candidates);
  const int t = Q.order();
  // Row radii once; deleting column k lowers radius of row r by |Q_rk|.
  VectorXd radius(t);
  for (int r = 0; r < t; ++r) radius(r) = Q.dense().row(r).cwiseAbs().sum() - std::abs(Q(r, r));
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < t; ++k) {
    double bound = std::numeric_limits<double>::infinity();
    for (int r = 0; r < t; ++r) {
      if (r != k) bound = std::min(bound, Q(r, r) - (radius(r) - std::abs(Q(r, k))));
    }
    if (k == 0 || better(bound, best_value)) {
      best = k;
      best_value = bound;
    }
  }
  return candidates[static_cast<std::size_t>(best)];
}

int spectral_branch_approx(const VectorXd& eigvec, std::span<const int> candidates) {
  if (candidates.empty() || static_cast<int>(candidates.size()) != eigvec.size()) {
    throw std::invalid_argument("eigenvector does not match the candidate list");
  }
  if (!(eigvec.cwiseAbs().maxCoeff() > 0.0)) throw std::invalid_argument("zero eigenvector");
  int best = 0;
  for (int k = 1; k < eigvec.size(); ++k) {
    if (better(std::abs(eigvec(k)), std::abs(eigvec(best)))) best = k;
  }
  return candidates[static_cast<std::size_t>(best)];
}

double branching_gap_metric(const DeletionProfile& p, int choice) {
  if (p.lambda.size() < 3) throw std::invalid_argument("gap metric needs order >= 3");
  const double denom = p.lambda(p.worst) - p.lambda(p.best);
  if (std::abs(denom) < 1e-12) return 0.0;
  return 100.0 * (p.lambda(choice) - p.lambda(p.best)) / denom + 0.0;
}

double branching_gap_metric(const SymMatrix& Q, int choice) {
  return branching_gap_metric(deletion_profile(Q), choice);
}

std::optional<BranchDecision> spatial_branch(const RestrictedProblem& r, const VectorXd& x,
                                             double alpha, std::span<const int> candidates) {
  int best = -1;
  double best_score = 0.0;
  for (int k : candidates) {
    const double l = r.lower(k), u = r.upper(k), xi = std::clamp(x(k), l, u);
    const double slack = (l + u) * xi - l * u - xi * xi;
    const double score = (std::abs(r.Q(k, k)) + alpha) * slack;
    if (score > 0.0 && (best < 0 || better(score, best_score))) {
      best = k;
      best_score = score;
    }
  }
  if (best < 0) return std::nullopt;
  const double l = r.lower(best), u = r.upper(best), w = u - l;
  BranchDecision d;
  d.variable = r.free[static_cast<std::size_t>(best)];
  d.kind = BranchKind::kSpatialSplit;
  d.split = std::clamp(x(best), l + kSpatialTheta * w, u - kSpatialTheta * w);
  d.rule = "spatial";
  return d;
}

std::optional<int> most_fractional_branch(const VectorXd& x, std::span<const int> candidates,
                                          double int_tol) {
  std::optional<int> best;
  double best_frac = int_tol;
  for (int k : candidates) {
    const double frac = std::min(x(k) - std::floor(x(k)), std::ceil(x(k)) - x(k));
    if (frac > best_frac && (!best || better(frac, best_frac))) {
      best = k;
      best_frac = frac;
    }
  }
  return best;
}

}  // namespace smiqp
