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

#include "smiqp/qpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "smiqp/linalg.hpp"

namespace smiqp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEqualityRhoFactor = 1e3;
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr int kPolishExtraIter = 1000;

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

double finite_inf_norm(const VectorXd& v) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v(i))) out = std::max(out, std::abs(v(i)));
  }
  return out;
}

// min 1/2 x'Px + c'x  s.t.  lo <= Mx <= hi. Every feasible x has
// ||x||_2 <= radius.
struct CoreProblem {
  MatrixXd P;
  VectorXd c;
  MatrixXd M;
  VectorXd lo;
  VectorXd hi;
  double radius = 0.0;
};

// Row duals follow Px + c + M'y = 0: y > 0 on upper-active rows, y < 0 on
// lower-active rows.
struct CoreResult {
  QpStatus status = QpStatus::kMaxIter;
  VectorXd x;
  VectorXd y;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool polished = false;
};

enum class RowState : signed char { kInactive = 0, kLower = -1, kUpper = 1, kEquality = 2 };

std::vector<RowState> guess_active(const CoreProblem& p, const VectorXd& z, const VectorXd& y) {
  std::vector<RowState> out(static_cast<std::size_t>(p.lo.size()), RowState::kInactive);
  for (Eigen::Index i = 0; i < p.lo.size(); ++i) {
    auto& s = out[static_cast<std::size_t>(i)];
    if (p.lo(i) == p.hi(i)) {
      s = RowState::kEquality;
    } else if (std::isfinite(p.lo(i)) && z(i) - p.lo(i) < -y(i)) {
      s = RowState::kLower;
    } else if (std::isfinite(p.hi(i)) && p.hi(i) - z(i) < y(i)) {
      s = RowState::kUpper;
    }
  }
  return out;
}

// Solves the equality-constrained KKT system of the guessed active set for
// a correction to x (minimum-norm, so degenerate faces stay near the ADMM
// iterate) and accepts it only if it is a KKT point of the full problem.
bool polish(const CoreProblem& p, const std::vector<RowState>& active, double tol, VectorXd& x,
            VectorXd& y) {
  const auto n = p.P.rows();
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < p.lo.size(); ++i) {
    if (active[static_cast<std::size_t>(i)] != RowState::kInactive) rows.push_back(i);
  }
  const auto na = static_cast<Eigen::Index>(rows.size());
  MatrixXd kkt = MatrixXd::Zero(n + na, n + na);
  VectorXd rhs(n + na);
  kkt.topLeftCorner(n, n) = p.P;
  rhs.head(n) = -(p.c + p.P * x);
  for (Eigen::Index k = 0; k < na; ++k) {
    const Eigen::Index i = rows[static_cast<std::size_t>(k)];
    kkt.block(n + k, 0, 1, n) = p.M.row(i);
    kkt.block(0, n + k, n, 1) = p.M.row(i).transpose();
    const double target = active[static_cast<std::size_t>(i)] == RowState::kUpper ? p.hi(i) : p.lo(i);
    rhs(n + k) = target - p.M.row(i).dot(x);
  }
  const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(kkt);
  const VectorXd sol = cod.solve(rhs);
  if (!sol.allFinite()) return false;

  const VectorXd xp = x + sol.head(n);
  VectorXd yp = VectorXd::Zero(p.lo.size());
  for (Eigen::Index k = 0; k < na; ++k) yp(rows[static_cast<std::size_t>(k)]) = sol(n + k);

  const VectorXd mx = p.M * xp;
  const double ptol = tol * (1.0 + std::max(finite_inf_norm(p.lo), finite_inf_norm(p.hi)));
  for (Eigen::Index i = 0; i < mx.size(); ++i) {
    if (mx(i) < p.lo(i) - ptol || mx(i) > p.hi(i) + ptol) return false;
  }
  const VectorXd px = p.P * xp;
  const VectorXd mty = p.M.transpose() * yp;
  const double dtol = tol * (1.0 + std::max({inf_norm(px), inf_norm(mty), inf_norm(p.c)}));
  for (Eigen::Index i = 0; i < yp.size(); ++i) {
    const auto s = active[static_cast<std::size_t>(i)];
    if (s == RowState::kLower) {
      if (yp(i) > dtol) return false;
      yp(i) = std::min(yp(i), 0.0);
    } else if (s == RowState::kUpper) {
      if (yp(i) < -dtol) return false;
      yp(i) = std::max(yp(i), 0.0);
    }
  }
  if (inf_norm(px + p.c + p.M.transpose() * yp) > dtol) return false;
  x = xp;
  y = yp;
  return true;
}

// Sound primal infeasibility test for a dual direction dy: for feasible x,
// dy'Mx <= support(dy) and dy'Mx >= -||M'dy||_2 * radius.
bool certifies_infeasible(const CoreProblem& p, const VectorXd& dy) {
  const double scale = inf_norm(dy);
  if (!(scale > 0.0)) return false;
  double support = 0.0;
  for (Eigen::Index i = 0; i < dy.size(); ++i) {
    if (dy(i) > 0.0) {
      if (!std::isfinite(p.hi(i))) return false;
      support += p.hi(i) * dy(i);
    } else if (dy(i) < 0.0) {
      if (!std::isfinite(p.lo(i))) return false;
      support += p.lo(i) * dy(i);
    }
  }
  const double lhs = support + (p.M.transpose() * dy).norm() * p.radius;
  const double margin = 1e-7 * scale * (1.0 + std::max(finite_inf_norm(p.lo), finite_inf_norm(p.hi)));
  return lhs < -margin;
}

CoreResult solve_core(const CoreProblem& p, const QpSettings& s) {
  const auto n = p.P.rows();
  const auto m = p.M.rows();

  // One pass of Ruiz equilibration on [P M'; M 0] plus cost scaling.
  VectorXd dvec = VectorXd::Ones(n);
  VectorXd evec = VectorXd::Ones(m);
  for (Eigen::Index j = 0; j < n; ++j) {
    double norm = p.P.col(j).cwiseAbs().maxCoeff();
    if (m > 0) norm = std::max(norm, p.M.col(j).cwiseAbs().maxCoeff());
    if (norm > 1e-8) dvec(j) = std::clamp(1.0 / std::sqrt(norm), 1e-4, 1e4);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const double norm = n > 0 ? p.M.row(i).cwiseAbs().maxCoeff() : 0.0;
    if (norm > 1e-8) evec(i) = std::clamp(1.0 / std::sqrt(norm), 1e-4, 1e4);
  }
  MatrixXd ps = dvec.asDiagonal() * p.P * dvec.asDiagonal();
  const MatrixXd ms = evec.asDiagonal() * p.M * dvec.asDiagonal();
  VectorXd cs = dvec.cwiseProduct(p.c);
  const double cost_norm =
      std::max(n > 0 ? ps.cwiseAbs().colwise().maxCoeff().mean() : 0.0, inf_norm(cs));
  const double cscale = cost_norm > 1e-8 ? std::clamp(1.0 / cost_norm, 1e-4, 1e4) : 1.0;
  ps *= cscale;
  cs *= cscale;
  const VectorXd los = evec.cwiseProduct(p.lo);
  const VectorXd his = evec.cwiseProduct(p.hi);

  double rho = s.rho;
  VectorXd rhov(m);
  auto set_rho = [&] {
    for (Eigen::Index i = 0; i < m; ++i) rhov(i) = p.lo(i) == p.hi(i) ? kEqualityRhoFactor * rho : rho;
  };
  set_rho();
  Eigen::LDLT<MatrixXd> ldlt;
  auto factor = [&] {
    MatrixXd k = ps + ms.transpose() * rhov.asDiagonal() * ms;
    k.diagonal().array() += s.sigma;
    ldlt.compute(k);
  };
  factor();

  VectorXd xs = VectorXd::Zero(n);
  VectorXd zs = VectorXd::Zero(m).cwiseMax(los).cwiseMin(his);
  VectorXd ys = VectorXd::Zero(m);

  CoreResult out;
  // Each rho change doubles the wait before the next one, so rho settles.
  int adapt_gap = s.check_every;
  int next_adapt = s.check_every;
  std::vector<RowState> last_active;
  std::vector<RowState> last_polish_try;
  int converged_at = -1;
  std::optional<CoreResult> converged;

  auto unscaled = [&](VectorXd& x, VectorXd& z, VectorXd& y) {
    x = dvec.cwiseProduct(xs);
    z = zs.cwiseQuotient(evec);
    y = evec.cwiseProduct(ys) / cscale;
  };

  for (int k = 1; k <= s.max_iter; ++k) {
    const VectorXd rhs = s.sigma * xs - cs + ms.transpose() * (rhov.cwiseProduct(zs) - ys);
    const VectorXd xt = ldlt.solve(rhs);
    const VectorXd zt = ms * xt;
    xs = s.alpha * xt + (1.0 - s.alpha) * xs;
    const VectorXd zr = s.alpha * zt + (1.0 - s.alpha) * zs;
    const VectorXd znew = (zr + ys.cwiseQuotient(rhov)).cwiseMax(los).cwiseMin(his);
    const VectorXd dy = rhov.cwiseProduct(zr - znew);
    ys += dy;
    zs = znew;

    if (k % s.check_every != 0 && k != s.max_iter) continue;

    VectorXd x, z, y;
    unscaled(x, z, y);
    const VectorXd mx = p.M * x;
    const VectorXd px = p.P * x;
    const VectorXd mty = p.M.transpose() * y;
    out.iterations = k;
    out.primal_residual = inf_norm(mx - z);
    out.dual_residual = inf_norm(px + p.c + mty);
    const double eps_p = s.tol * (1.0 + std::max(inf_norm(mx), inf_norm(z)));
    const double eps_d = s.tol * (1.0 + std::max({inf_norm(px), inf_norm(mty), inf_norm(p.c)}));

    const auto active = guess_active(p, z, y);
    if (out.primal_residual <= eps_p && out.dual_residual <= eps_d) {
      out.status = QpStatus::kOptimal;
      out.x = x;
      out.y = y;
      if (!s.polish) return out;
      if (active != last_polish_try) {
        last_polish_try = active;
        if (polish(p, active, s.tol, x, y)) {
          out.x = x;
          out.y = y;
          out.polished = true;
          return out;
        }
      }
      // Keep iterating for a better active set guess.
      converged = out;
      if (converged_at < 0) converged_at = k;
      if (k - converged_at >= kPolishExtraIter) return out;
      continue;
    }
    if (converged && k - converged_at >= kPolishExtraIter) return *converged;
    if (certifies_infeasible(p, evec.cwiseProduct(dy))) {
      out.status = QpStatus::kInfeasible;
      out.x = x;
      out.y = y;
      return out;
    }
    if (s.polish && active == last_active && active != last_polish_try) {
      last_polish_try = active;
      if (polish(p, active, s.tol, x, y)) {
        out.status = QpStatus::kOptimal;
        out.x = x;
        out.y = y;
        out.polished = true;
        out.primal_residual = 0.0;
        out.dual_residual = inf_norm(p.P * x + p.c + p.M.transpose() * y);
        return out;
      }
    }
    last_active = active;

    // Residual balancing in the scaled space.
    const VectorXd msx = ms * xs;
    const double sp = inf_norm(msx - zs) / std::max({inf_norm(msx), inf_norm(zs), 1e-10});
    const double sd = inf_norm(ps * xs + cs + ms.transpose() * ys) /
                      std::max({inf_norm(ps * xs), inf_norm(ms.transpose() * ys), inf_norm(cs), 1e-10});
    if (sp > 0.0 && sd > 0.0 && k >= next_adapt) {
      const double proposal = std::clamp(rho * std::sqrt(sp / sd), kRhoMin, kRhoMax);
      if (proposal > 5.0 * rho || proposal < 0.2 * rho) {
        rho = proposal;
        set_rho();
        factor();
        adapt_gap *= 2;
        next_adapt = k + adapt_gap;
      }
    }
  }
  if (converged) return *converged;
  out.x = dvec.cwiseProduct(xs);
  out.y = evec.cwiseProduct(ys) / cscale;
  out.status = QpStatus::kMaxIter;
  return out;
}

struct PrunedRows {
  MatrixXd M;
  VectorXd rhs;
  std::vector<int> kept;
};

// Drops all-zero rows. Returns false if a dropped row is violated.
bool prune_rows(const MatrixXd& m, const VectorXd& rhs, bool equality, PrunedRows& out) {
  const double tol = 1e-9 * (1.0 + inf_norm(rhs));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m.row(i).isZero(0.0)) {
      if (equality ? std::abs(rhs(i)) > tol : rhs(i) < -tol) return false;
      continue;
    }
    out.kept.push_back(static_cast<int>(i));
  }
  out.M.resize(static_cast<Eigen::Index>(out.kept.size()), m.cols());
  out.rhs.resize(static_cast<Eigen::Index>(out.kept.size()));
  for (std::size_t k = 0; k < out.kept.size(); ++k) {
    out.M.row(static_cast<Eigen::Index>(k)) = m.row(out.kept[k]);
    out.rhs(static_cast<Eigen::Index>(k)) = rhs(out.kept[k]);
  }
  return true;
}

QpSolution infeasible(const ConvexQpModel& model) {
  QpSolution sol;
  sol.status = QpStatus::kInfeasible;
  sol.x = VectorXd::Zero(model.n());
  sol.objective = kInf;
  sol.nu = VectorXd::Zero(model.A.rows());
  sol.mu = VectorXd::Zero(model.C.rows());
  sol.pi_lower = VectorXd::Zero(model.n());
  sol.pi_upper = VectorXd::Zero(model.n());
  return sol;
}

void validate_model(const ConvexQpModel& model) {
  const int n = model.n();
  if (n < 1) throw std::invalid_argument("qp model has no variables");
  if (model.Q.rows() != n || model.Q.cols() != n || model.lower.size() != n ||
      model.upper.size() != n || (model.A.rows() > 0 && model.A.cols() != n) ||
      (model.C.rows() > 0 && model.C.cols() != n) || model.A.rows() != model.b.size() ||
      model.C.rows() != model.d.size()) {
    throw std::invalid_argument("qp model has inconsistent dimensions");
  }
}

}  // namespace

std::string to_string(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kMaxIter: return "max_iter";
  }
  return "unknown";
}

QpSolution solve_convex_qp(const ConvexQpModel& model, const QpSettings& settings) {
  validate_model(model);
  const int n = model.n();
  PrunedRows eq, ineq;
  if (!prune_rows(model.A, model.b, true, eq)) return infeasible(model);
  if (!prune_rows(model.C, model.d, false, ineq)) return infeasible(model);
  for (int i = 0; i < n; ++i) {
    if (model.lower(i) > model.upper(i)) return infeasible(model);
  }
  const auto me = eq.M.rows();
  const auto mi = ineq.M.rows();
  const double box_radius = model.lower.cwiseAbs().cwiseMax(model.upper.cwiseAbs()).norm();

  VectorXd x0 = VectorXd::Zero(n);
  if (me > 0) {
    const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(eq.M);
    x0 = cod.solve(eq.rhs);
    if (inf_norm(eq.M * x0 - eq.rhs) > 1e-9 * (1.0 + inf_norm(eq.rhs))) return infeasible(model);
  }

  const MatrixXd p_full = 2.0 * model.Q;
  QpSolution sol;
  VectorXd y_eq = VectorXd::Zero(me);
  VectorXd y_ineq, y_box;
  CoreResult core;
  const bool reduced = model.nullspace_convex && me > 0;

  if (!reduced) {
    CoreProblem p;
    p.P = p_full;
    p.c = model.q;
    p.M.resize(me + mi + n, n);
    p.M << eq.M, ineq.M, MatrixXd::Identity(n, n);
    p.lo.resize(me + mi + n);
    p.hi.resize(me + mi + n);
    p.lo << eq.rhs, VectorXd::Constant(mi, -kInf), model.lower;
    p.hi << eq.rhs, ineq.rhs, model.upper;
    p.radius = box_radius;
    core = solve_core(p, settings);
    sol.x = core.x;
    y_eq = core.y.head(me);
    y_ineq = core.y.segment(me, mi);
    y_box = core.y.tail(n);
  } else {
    const MatrixXd z = nullspace_basis(eq.M);
    if (z.cols() == 0) {
      const double tol = 1e-9 * (1.0 + box_radius);
      if (((x0 - model.lower).array() < -tol).any() || ((model.upper - x0).array() < -tol).any() ||
          (mi > 0 && ((ineq.M * x0 - ineq.rhs).array() > tol).any())) {
        return infeasible(model);
      }
      core.status = QpStatus::kOptimal;
      sol.x = x0.cwiseMax(model.lower).cwiseMin(model.upper);
      y_ineq = VectorXd::Zero(mi);
      y_box = VectorXd::Zero(n);
    } else {
      const auto nz = z.cols();
      CoreProblem p;
      MatrixXd pz = z.transpose() * p_full * z;
      p.P = 0.5 * (pz + pz.transpose());
      p.c = z.transpose() * (p_full * x0 + model.q);
      p.M.resize(mi + n, nz);
      p.M << ineq.M * z, z;
      p.lo.resize(mi + n);
      p.hi.resize(mi + n);
      p.lo << VectorXd::Constant(mi, -kInf), model.lower - x0;
      p.hi << ineq.rhs - ineq.M * x0, model.upper - x0;
      p.radius = box_radius + x0.norm();
      core = solve_core(p, settings);
      sol.x = x0 + z * core.x;
      y_ineq = core.y.head(mi);
      y_box = core.y.tail(n);
    }
  }

  sol.status = core.status;
  sol.iterations = core.iterations;
  sol.primal_residual = core.primal_residual;
  sol.dual_residual = core.dual_residual;
  sol.polished = core.polished;
  if (sol.status == QpStatus::kInfeasible) return infeasible(model);

  sol.mu = VectorXd::Zero(model.C.rows());
  for (Eigen::Index k = 0; k < mi; ++k) sol.mu(ineq.kept[static_cast<std::size_t>(k)]) = std::max(y_ineq(k), 0.0);
  sol.pi_upper = y_box.cwiseMax(0.0);
  sol.pi_lower = (-y_box).cwiseMax(0.0);
  if (reduced && me > 0) {
    // Equality multipliers from stationarity: A'nu = -(2Qx + q + C'mu - pi_l + pi_u).
    VectorXd r = p_full * sol.x + model.q - sol.pi_lower + sol.pi_upper;
    if (model.C.rows() > 0) r += model.C.transpose() * sol.mu;
    const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(eq.M.transpose());
    y_eq = cod.solve(-r);
  }
  sol.nu = VectorXd::Zero(model.A.rows());
  for (Eigen::Index k = 0; k < me; ++k) sol.nu(eq.kept[static_cast<std::size_t>(k)]) = y_eq(k);
  sol.objective = model.objective(sol.x);
  return sol;
}

QpSolution solve_lp(const ConvexQpModel& model, const QpSettings& settings) {
  if (!model.is_lp()) throw std::invalid_argument("solve_lp called on a model with a quadratic term");
  return solve_convex_qp(model, settings);
}

KktReport verify_kkt(const ConvexQpModel& model, const QpSolution& sol, double kkt_tol) {
  const int n = model.n();
  if (sol.x.size() != n || sol.nu.size() != model.A.rows() || sol.mu.size() != model.C.rows() ||
      sol.pi_lower.size() != n || sol.pi_upper.size() != n) {
    throw std::invalid_argument("solution dimensions do not match the model");
  }
  const VectorXd& x = sol.x;
  VectorXd grad = 2.0 * model.Q * x + model.q - sol.pi_lower + sol.pi_upper;
  if (model.A.rows() > 0) grad += model.A.transpose() * sol.nu;
  if (model.C.rows() > 0) grad += model.C.transpose() * sol.mu;

  KktReport r;
  r.stationarity = inf_norm(grad);

  double primal = 0.0;
  if (model.A.rows() > 0) primal = inf_norm(model.A * x - model.b);
  VectorXd slack_c;
  if (model.C.rows() > 0) {
    slack_c = model.d - model.C * x;
    primal = std::max(primal, (-slack_c).cwiseMax(0.0).maxCoeff());
  }
  const VectorXd slack_l = x - model.lower;
  const VectorXd slack_u = model.upper - x;
  primal = std::max({primal, (-slack_l).cwiseMax(0.0).maxCoeff(), (-slack_u).cwiseMax(0.0).maxCoeff()});
  r.primal_feasibility = primal;

  double comp = std::max(inf_norm(sol.pi_lower.cwiseProduct(slack_l)),
                         inf_norm(sol.pi_upper.cwiseProduct(slack_u)));
  if (model.C.rows() > 0) comp = std::max(comp, inf_norm(sol.mu.cwiseProduct(slack_c)));
  r.complementarity = comp;

  double dual = std::max((-sol.pi_lower).cwiseMax(0.0).maxCoeff(), (-sol.pi_upper).cwiseMax(0.0).maxCoeff());
  if (model.C.rows() > 0) dual = std::max(dual, (-sol.mu).cwiseMax(0.0).maxCoeff());
  r.dual_feasibility = dual;

  r.pass = r.stationarity <= kkt_tol && r.primal_feasibility <= kkt_tol &&
           r.complementarity <= kkt_tol && r.dual_feasibility <= kkt_tol;
  return r;
}

}  // namespace smiqp
