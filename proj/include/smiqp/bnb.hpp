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

// Best-bound branch-and-bound over spectral, McCormick and separable
// relaxations, with the dynamic LP/QP selection rule in AUTO mode.

#ifndef SMIQP_BNB_HPP
#define SMIQP_BNB_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smiqp/problem.hpp"
#include "smiqp/qpsolve.hpp"
#include "smiqp/relaxation.hpp"

namespace smiqp {

enum class RelaxMode { kEig, kGeig, kEigzApprox, kMcCormick, kSeparable, kAuto };
enum class BranchRule { kApprox, kGct, kExact, kFractional, kAuto };

std::string to_string(RelaxMode mode);
std::string to_string(BranchRule rule);
/// Accepts eig, geig, eigz (or eigz_approx), mccormick, separable, auto.
RelaxMode relax_mode_from_string(std::string_view name);
BranchRule branch_rule_from_string(std::string_view name);

struct SelectionParams {
  double sigma_lp = 10.0;
  double sigma_qp = 2.0;
  double omega_lp_max = 1000.0;
  double omega_qp_max = 10.0;
  double abs_tol = 1e-3;
};

/// omega_* is the interval, in processed nodes, between solves of that
/// relaxation class. since_* counts nodes since the last solve.
struct SelectionState {
  double omega_lp = 1.0;
  double omega_qp = 1.0;
  long since_lp = std::numeric_limits<int>::max();
  long since_qp = std::numeric_limits<int>::max();
};

/// Called when both relaxations were solved at the same node. A QP bound
/// better than the LP bound by abs_tol makes the QP more frequent and the LP
/// less frequent; otherwise the reverse.
SelectionState dynamic_selection_update(SelectionState state, double f_lp, double f_qp,
                                        const SelectionParams& params = {});

struct SolverConfig {
  RelaxMode relax = RelaxMode::kAuto;
  BranchRule branch = BranchRule::kAuto;
  double rel_tol = 1e-6;
  double abs_tol = 1e-6;
  double time_limit = std::numeric_limits<double>::infinity();  ///< seconds
  long node_limit = std::numeric_limits<long>::max();
  DeltaParams delta;
  SelectionParams selection;
  std::uint64_t seed = 0;
  QpSettings qp;
  bool record_trace = false;
};

enum class SolveStatus { kOptimal, kTimeLimit, kNodeLimit, kInfeasible };

std::string to_string(SolveStatus status);

/// One processed node. `branch_variable` is 0-based, -1 when the node was
/// not branched.
struct TraceRecord {
  long id = 0;
  int depth = 0;
  double bound = 0.0;
  std::string kind;
  int branch_variable = -1;

  /// JSON object on one line; indices are 1-based, a missing branch is null.
  std::string to_json() const;
};

struct SolveStats {
  long relaxations = 0;       ///< convex models handed to qpsolve
  long kkt_rejected = 0;      ///< Optimal solutions failing verify_kkt at 1e-6
  long kkt_over_1e5 = 0;      ///< Optimal solutions failing at 1e-5
  long not_converged = 0;
  long fallbacks = 0;         ///< nodes bounded by a fallback relaxation
  long parent_bounds = 0;     ///< nodes that kept the inherited bound
  long lp_solves = 0;
  long qp_solves = 0;
  double worst_kkt = 0.0;     ///< largest KKT residual among Optimal solutions
};

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  VectorXd x;  ///< empty when no incumbent
  double f_ubd = std::numeric_limits<double>::infinity();
  double f_lbd = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();  ///< percent
  long nodes = 0;
  double wall_ms = 0.0;
  double root_bound = -std::numeric_limits<double>::infinity();
  double delta = 1.0;  ///< delta chosen at the root (EIGZ_APPROX)
  SolveStats stats;
  std::vector<TraceRecord> trace;  ///< filled when config.record_trace
};

/// 100 (f_ubd - f_lbd) / max(|f_lbd|, 1e-3); +inf when f_ubd is +inf.
double relative_gap(double f_ubd, double f_lbd);

SolveResult solve(const Problem& problem, const SolverConfig& config = {});

/// Bound of one node, with the point and eigenvector that branching uses.
struct NodeBound {
  double value = -std::numeric_limits<double>::infinity();
  bool infeasible = false;
  std::string kind;
  VectorXd x;           ///< relaxation point over the free variables (may be empty)
  bool convex = false;  ///< Q convex over the free variables (or on null(A))
  double alpha = 0.0;   ///< EIG shift of the node
  VectorXd eigvec;      ///< eigenvector for approximate spectral branching
};

/// Bounds the restricted node. `parent_bound` is returned (kind PARENT) when
/// every relaxation fails. `root_delta` is the delta used for EIGZ_APPROX.
NodeBound lower_bound(const RestrictedProblem& r, const SolverConfig& config, double root_delta,
                      double parent_bound, SelectionState& selection, SolveStats& stats);

/// Root bound of a single relaxation kind, for gap studies. The EIGZ kind
/// runs the delta search. nullopt when the relaxation could not be solved or
/// certified; +inf when it is infeasible.
struct RootBound {
  double value = 0.0;
  double alpha = 0.0;
  double delta = 1.0;
};

std::optional<RootBound> root_relaxation_bound(const Problem& problem, RelaxMode kind,
                                               const DeltaParams& params = {},
                                               const QpSettings& qp = {});

struct Candidate {
  VectorXd x;
  double value = 0.0;
};

/// Rounding (top-k for a single cardinality row), the relaxation point and,
/// with continuous variables, projected gradient on the true objective
/// followed by a face solve. Returns the best feasible candidate strictly
/// better than `incumbent`.
std::optional<Candidate> upper_bound_heuristic(const Problem& problem, const NodeRestriction& node,
                                               const VectorXd& relax_free, double incumbent);

}  // namespace smiqp

#endif  // SMIQP_BNB_HPP
