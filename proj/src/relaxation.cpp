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

#include "smiqp/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace smiqp {
namespace {

SpectralShift make_shift(ShiftKind kind, const EigenPair& pair, double delta) {
  SpectralShift s;
  s.kind = kind;
  s.lambda_raw = pair.value;
  s.alpha = std::max(0.0, -pair.value);
  s.delta = delta;
  s.eigvec = pair.vector;
  return s;
}

SpectralShift empty_shift(ShiftKind kind, int order) {
  SpectralShift s;
  s.kind = kind;
  s.eigvec = VectorXd::Zero(order);
  return s;
}

SymMatrix pencil(const MatrixXd& A, int order, double delta) {
  MatrixXd n = MatrixXd::Identity(order, order);
  if (A.rows() > 0) n += delta * A.transpose() * A;
  return SymMatrix::symmetrized(n);
}

ConvexQpModel carry_constraints(const RestrictedProblem& r) {
  ConvexQpModel m;
  m.A = r.A;
  m.b = r.b;
  m.C = r.C;
  m.d = r.d;
  m.lower = r.lower;
  m.upper = r.upper;
  m.num_x = r.n();
  return m;
}

ConvexQpModel shifted_model(const RestrictedProblem& r, double alpha, bool augment, bool nullspace) {
  ConvexQpModel m = carry_constraints(r);
  m.Q = r.Q.dense();
  m.Q.diagonal().array() += alpha;
  m.q = r.q - alpha * (r.lower + r.upper);
  m.constant = r.constant + alpha * r.lower.dot(r.upper);
  if (augment && r.A.rows() > 0) {
    m.Q += alpha * r.A.transpose() * r.A;
    m.q -= 2.0 * alpha * r.A.transpose() * r.b;
    m.constant += alpha * r.b.squaredNorm();
  }
  m.Q = 0.5 * (m.Q + m.Q.transpose()).eval();
  m.nullspace_convex = nullspace && r.A.rows() > 0;
  return m;
}

}  // namespace

std::string to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::kEig: return "EIG";
    case ShiftKind::kGeig: return "GEIG";
    case ShiftKind::kEigzExact: return "EIGZ_EXACT";
    case ShiftKind::kEigzApprox: return "EIGZ_APPROX";
  }
  return "unknown";
}

NodeRestriction make_restriction(const VectorXd& lo, const VectorXd& hi) {
  NodeRestriction node;
  std::vector<double> fixed_values;
  std::vector<double> lower, upper;
  for (int i = 0; i < lo.size(); ++i) {
    if (lo(i) == hi(i)) {
      node.fixed.push_back(i);
      fixed_values.push_back(lo(i));
    } else {
      node.free.push_back(i);
      lower.push_back(lo(i));
      upper.push_back(hi(i));
    }
  }
  node.fixed_values = Eigen::Map<VectorXd>(fixed_values.data(), static_cast<Eigen::Index>(fixed_values.size()));
  node.lower = Eigen::Map<VectorXd>(lower.data(), static_cast<Eigen::Index>(lower.size()));
  node.upper = Eigen::Map<VectorXd>(upper.data(), static_cast<Eigen::Index>(upper.size()));
  return node;
}

RestrictedProblem restrict(const Problem& problem, const NodeRestriction& node) {
  const auto& B = node.free;
  const auto& F = node.fixed;
  const VectorXd& xf = node.fixed_values;
  RestrictedProblem r;
  r.free = B;
  r.Q = SymMatrix::symmetrized(problem.Q()(B, B));
  r.q = problem.q()(B);
  r.constant = problem.offset();
  if (!F.empty()) {
    r.q += 2.0 * problem.Q()(B, F) * xf;
    r.constant += xf.dot(problem.Q()(F, F) * xf) + problem.q()(F).dot(xf);
  }
  const auto me = problem.num_equalities();
  const auto mi = problem.num_inequalities();
  r.A = problem.A()(Eigen::all, B);
  r.b = problem.b();
  r.C = problem.C()(Eigen::all, B);
  r.d = problem.d();
  if (!F.empty()) {
    if (me > 0) r.b -= problem.A()(Eigen::all, F) * xf;
    if (mi > 0) r.d -= problem.C()(Eigen::all, F) * xf;
  }
  r.lower = node.lower;
  r.upper = node.upper;
  return r;
}

VectorXd expand_point(const NodeRestriction& node, const VectorXd& x_free, int n) {
  VectorXd x(n);
  for (std::size_t k = 0; k < node.free.size(); ++k) x(node.free[k]) = x_free(static_cast<Eigen::Index>(k));
  for (std::size_t k = 0; k < node.fixed.size(); ++k) {
    x(node.fixed[k]) = node.fixed_values(static_cast<Eigen::Index>(k));
  }
  return x;
}

SpectralShift compute_shift_eig(const SymMatrix& Q) {
  if (Q.order() == 0) return empty_shift(ShiftKind::kEig, 0);
  return make_shift(ShiftKind::kEig, sym_eig_min(Q), 1.0);
}

SpectralShift compute_shift_geig(const SymMatrix& Q, const MatrixXd& A) {
  if (Q.order() == 0) return empty_shift(ShiftKind::kGeig, 0);
  return make_shift(ShiftKind::kGeig, gen_eig_min(Q, pencil(A, Q.order(), 1.0)), 1.0);
}

SpectralShift compute_shift_eigz_exact(const SymMatrix& Q, const MatrixXd& A) {
  const int t = Q.order();
  if (t == 0) return empty_shift(ShiftKind::kEigzExact, 0);
  const MatrixXd z = nullspace_basis(A);
  if (z.cols() == 0) return empty_shift(ShiftKind::kEigzExact, t);
  const EigenPair reduced = sym_eig_min(SymMatrix::symmetrized(z.transpose() * Q.dense() * z));
  EigenPair pair{reduced.value, z * reduced.vector};
  pair.vector.normalize();
  normalize_sign(pair.vector);
  return make_shift(ShiftKind::kEigzExact, pair, 1.0);
}

SpectralShift compute_shift_at_delta(const SymMatrix& Q, const MatrixXd& A, double delta) {
  if (Q.order() == 0) return empty_shift(ShiftKind::kEigzApprox, 0);
  return make_shift(ShiftKind::kEigzApprox, gen_eig_min(Q, pencil(A, Q.order(), delta)), delta);
}

SpectralShift compute_shift_eigz_approx(const SymMatrix& Q, const MatrixXd& A,
                                        const DeltaParams& params) {
  if (!(params.sigma > 1.0) || params.max_iter < 1 || !(params.rel_tol > 0.0)) {
    throw std::invalid_argument("delta search needs sigma > 1, max_iter >= 1, rel_tol > 0");
  }
  if (Q.order() == 0) return empty_shift(ShiftKind::kEigzApprox, 0);
  double delta = 1.0;
  SpectralShift current = compute_shift_at_delta(Q, A, delta);
  std::vector<DeltaStep> history{{delta, current.lambda_raw}};
  for (int k = 0; k + 1 < params.max_iter; ++k) {
    delta *= params.sigma;
    SpectralShift next = compute_shift_at_delta(Q, A, delta);
    history.push_back({delta, next.lambda_raw});
    const double change = std::abs(next.lambda_raw - current.lambda_raw) /
                          std::max(std::abs(current.lambda_raw), 1e-12);
    current = std::move(next);
    if (change <= params.rel_tol) break;
  }
  current.history = std::move(history);
  return current;
}

ConvexQpModel build_spectral_relaxation(const RestrictedProblem& r, const SpectralShift& shift) {
  if (shift.alpha < 0.0) throw std::invalid_argument("negative spectral shift");
  const bool nullspace = shift.kind == ShiftKind::kEigzExact || shift.kind == ShiftKind::kEigzApprox;
  return shifted_model(r, shift.alpha, shift.kind == ShiftKind::kGeig, nullspace);
}

ConvexQpModel build_plain_relaxation(const RestrictedProblem& r, bool nullspace_convex) {
  return shifted_model(r, 0.0, false, nullspace_convex);
}

std::pair<double, double> envelope_concave_square(double l, double u) {
  if (!(l < u)) throw std::invalid_argument(fmt::format("empty interval [{}, {}]", l, u));
  return {l + u, -l * u};
}

ConvexQpModel build_mccormick_relaxation(const RestrictedProblem& r) {
  const int nb = r.n();
  std::vector<LiftedColumn> pairs;
  for (int i = 0; i < nb; ++i) {
    for (int j = i; j < nb; ++j) {
      if (r.Q(i, j) != 0.0) pairs.push_back({i, j});
    }
  }
  const int np = static_cast<int>(pairs.size());
  const int nv = nb + np;

  int mc_rows = 0;
  for (const auto& p : pairs) mc_rows += p.i == p.j ? 3 : 4;
  const auto mi = r.C.rows();

  ConvexQpModel m;
  m.num_x = nb;
  m.lifted = pairs;
  m.Q = MatrixXd::Zero(nv, nv);
  m.q = VectorXd::Zero(nv);
  m.q.head(nb) = r.q;
  m.constant = r.constant;
  m.A = MatrixXd::Zero(r.A.rows(), nv);
  m.A.leftCols(nb) = r.A;
  m.b = r.b;
  m.C = MatrixXd::Zero(mi + mc_rows, nv);
  m.C.topLeftCorner(mi, nb) = r.C;
  m.d = VectorXd::Zero(mi + mc_rows);
  m.d.head(mi) = r.d;
  m.lower.resize(nv);
  m.upper.resize(nv);
  m.lower.head(nb) = r.lower;
  m.upper.head(nb) = r.upper;

  Eigen::Index row = mi;
  auto add_row = [&](int xi, double ci, int xj, double cj, int col, double cx, double rhs) {
    m.C(row, xi) += ci;
    m.C(row, xj) += cj;
    m.C(row, col) += cx;
    m.d(row) = rhs;
    ++row;
  };
  for (int k = 0; k < np; ++k) {
    const int i = pairs[static_cast<std::size_t>(k)].i;
    const int j = pairs[static_cast<std::size_t>(k)].j;
    const int col = nb + k;
    const double li = r.lower(i), ui = r.upper(i), lj = r.lower(j), uj = r.upper(j);
    m.q(col) = i == j ? r.Q(i, i) : 2.0 * r.Q(i, j);

    // X >= l_i x_j + l_j x_i - l_i l_j and X >= u_i x_j + u_j x_i - u_i u_j
    add_row(j, li, i, lj, col, -1.0, li * lj);
    add_row(j, ui, i, uj, col, -1.0, ui * uj);
    // X <= u_i x_j + l_j x_i - u_i l_j
    add_row(j, -ui, i, -lj, col, 1.0, -ui * lj);
    if (i != j) {
      // X <= l_i x_j + u_j x_i - l_i u_j
      add_row(j, -li, i, -uj, col, 1.0, -li * uj);
    }

    if (i == j) {
      const double hi = std::max(li * li, ui * ui);
      const double lo = (li < 0.0 && ui > 0.0) ? 0.0 : std::min(li * li, ui * ui);
      m.lower(col) = lo;
      m.upper(col) = hi;
    } else {
      const double c[4] = {li * lj, li * uj, ui * lj, ui * uj};
      m.lower(col) = *std::min_element(c, c + 4);
      m.upper(col) = *std::max_element(c, c + 4);
    }
    if (m.lower(col) == m.upper(col)) m.upper(col) += 1e-12 * (1.0 + std::abs(m.upper(col)));
  }
  return m;
}

VectorXd lift_point(const ConvexQpModel& mccormick, const VectorXd& x) {
  if (x.size() != mccormick.num_x) throw std::invalid_argument("point length does not match the x block");
  VectorXd v(mccormick.n());
  v.head(mccormick.num_x) = x;
  for (std::size_t k = 0; k < mccormick.lifted.size(); ++k) {
    const auto& p = mccormick.lifted[k];
    v(mccormick.num_x + static_cast<Eigen::Index>(k)) = x(p.i) * x(p.j);
  }
  return v;
}

std::optional<ConvexQpModel> build_separable_relaxation(const RestrictedProblem& r,
                                                        const LpSolver& lp_solve) {
  const int nb = r.n();
  ConvexQpModel m = carry_constraints(r);
  m.Q = MatrixXd::Zero(nb, nb);
  m.q = r.q;
  m.constant = r.constant;
  if (nb == 0) return m;

  const SymEigen eig = sym_eig(r.Q);
  const double zero_tol = 1e-12 * std::max(1.0, r.Q.norm_inf());

  ConvexQpModel lp = carry_constraints(r);
  lp.Q = MatrixXd::Zero(nb, nb);
  lp.constant = 0.0;

  for (int k = 0; k < nb; ++k) {
    const double lam = eig.values(k);
    const VectorXd v = eig.vectors.col(k);
    if (lam > zero_tol) {
      m.Q += lam * v * v.transpose();
      continue;
    }
    if (lam >= -zero_tol) continue;

    // Range of v'x over the node: LP where possible, interval arithmetic
    // over the box otherwise.
    double box_lo = 0.0, box_hi = 0.0;
    for (int i = 0; i < nb; ++i) {
      box_lo += std::min(v(i) * r.lower(i), v(i) * r.upper(i));
      box_hi += std::max(v(i) * r.lower(i), v(i) * r.upper(i));
    }
    double lo = box_lo, hi = box_hi;
    lp.q = v;
    const QpSolution smin = lp_solve(lp);
    if (smin.status == QpStatus::kInfeasible) return std::nullopt;
    if (smin.status == QpStatus::kOptimal) lo = std::max(box_lo, smin.objective - 1e-7 * (1.0 + std::abs(smin.objective)));
    lp.q = -v;
    const QpSolution smax = lp_solve(lp);
    if (smax.status == QpStatus::kInfeasible) return std::nullopt;
    if (smax.status == QpStatus::kOptimal) hi = std::min(box_hi, -smax.objective + 1e-7 * (1.0 + std::abs(smax.objective)));
    if (hi < lo) hi = lo;

    // lam * y^2 >= lam * ((lo + hi) y - lo hi) for y in [lo, hi]
    m.q += lam * (lo + hi) * v;
    m.constant -= lam * lo * hi;
  }
  m.Q = 0.5 * (m.Q + m.Q.transpose()).eval();
  return m;
}

}  // namespace smiqp
