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

// Convex QP / LP solver for relaxation models: ADMM on the stacked row
// system with active-set polishing, plus an independent KKT checker.

#ifndef SMIQP_QPSOLVE_HPP
#define SMIQP_QPSOLVE_HPP

#include <string>

#include "smiqp/convex_model.hpp"

namespace smiqp {

enum class QpStatus { kOptimal, kInfeasible, kMaxIter };

std::string to_string(QpStatus status);

struct QpSettings {
  double tol = 1e-8;
  int max_iter = 50000;
  double sigma = 1e-6;
  double alpha = 1.6;
  double rho = 0.1;
  int check_every = 25;
  bool polish = true;
};

/// Multiplier signs: nu free; mu, pi_lower, pi_upper >= 0, with
/// 2Qx + q + A'nu + C'mu - pi_lower + pi_upper = 0 at a KKT point.
struct QpSolution {
  QpStatus status = QpStatus::kMaxIter;
  VectorXd x;
  double objective = 0.0;  ///< includes the model constant
  VectorXd nu;
  VectorXd mu;
  VectorXd pi_lower;
  VectorXd pi_upper;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool polished = false;
};

struct KktReport {
  double stationarity = 0.0;
  double primal_feasibility = 0.0;
  double complementarity = 0.0;
  double dual_feasibility = 0.0;
  bool pass = false;
};

/// Requires Q PSD, or PSD on null(A) when the model is flagged
/// nullspace-convex (solved in coordinates x = x0 + Zz).
QpSolution solve_convex_qp(const ConvexQpModel& model, const QpSettings& settings = {});

/// solve_convex_qp for models with Q == 0.
QpSolution solve_lp(const ConvexQpModel& model, const QpSettings& settings = {});

KktReport verify_kkt(const ConvexQpModel& model, const QpSolution& solution,
                     double kkt_tol = 1e-6);

}  // namespace smiqp

#endif  // SMIQP_QPSOLVE_HPP
