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

#include "smiqp/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "smiqp/branching.hpp"

namespace smiqp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kConvexTol = 1e-10;
constexpr double kKktTol = 1e-6;
constexpr double kFeasTol = 1e-9;
constexpr double kGuardDiameter = 1e-9;
constexpr int kGradientSteps = 100;
constexpr int kMultistarts = 10;

struct Attempt {
  bool valid = false;
  bool infeasible = false;
  double value = -kInf;
  VectorXd x;
};

Attempt attempt(const ConvexQpModel& model, const QpSettings& settings, SolveStats& stats) {
  Attempt a;
  QpSolution sol;
  try {
    sol = solve_convex_qp(model, settings);
  } catch (const std::exception& e) {
    spdlog::debug("relaxation solve failed: {}", e.what());
    ++stats.not_converged;
    return a;
  }
  ++stats.relaxations;
  ++(model.is_lp() ? stats.lp_solves : stats.qp_solves);
  if (sol.status == QpStatus::kInfeasible) {
    a.infeasible = true;
    return a;
  }
  if (sol.status != QpStatus::kOptimal) {
    ++stats.not_converged;
    return a;
  }
  const KktReport kkt = verify_kkt(model, sol, kKktTol);
  const double worst = std::max({kkt.stationarity, kkt.primal_feasibility, kkt.complementarity,
                                 kkt.dual_feasibility});
  stats.worst_kkt = std::max(stats.worst_kkt, worst);
  if (worst > 1e-5) ++stats.kkt_over_1e5;
  if (!kkt.pass) {
    ++stats.kkt_rejected;
    return a;
  }
  a.valid = true;
  a.value = sol.objective;
  a.x = sol.x.head(model.num_x);
  return a;
}

std::string kind_name(RelaxMode mode) {
  switch (mode) {
    case RelaxMode::kEig: return "EIG";
    case RelaxMode::kGeig: return "GEIG";
    case RelaxMode::kEigzApprox: return "EIGZ_APPROX";
    case RelaxMode::kMcCormick: return "MCCORMICK";
    case RelaxMode::kSeparable: return "SEPARABLE";
    case RelaxMode::kAuto: return "AUTO";
  }
  return "?";
}

SpectralShift shift_for(RelaxMode mode, const RestrictedProblem& r, const SpectralShift& eig,
                        double delta) {
  switch (mode) {
    case RelaxMode::kGeig: return compute_shift_geig(r.Q, r.A);
    case RelaxMode::kEigzApprox:
      return r.A.rows() > 0 ? compute_shift_at_delta(r.Q, r.A, delta) : eig;
    default: return eig;
  }
}

// Bound from one relaxation kind at a node.
Attempt bound_with(RelaxMode mode, const RestrictedProblem& r, const SpectralShift& eig,
                   double delta, const SolverConfig& config, SolveStats& stats,
                   VectorXd* eigvec) {
  try {
    if (mode == RelaxMode::kMcCormick) {
      return attempt(build_mccormick_relaxation(r), config.qp, stats);
    }
    if (mode == RelaxMode::kSeparable) {
      const auto model = build_separable_relaxation(
          r, [&](const ConvexQpModel& m) { return solve_lp(m, config.qp); });
      if (!model) {
        Attempt a;
        a.infeasible = true;
        return a;
      }
      return attempt(*model, config.qp, stats);
    }
    const SpectralShift shift = shift_for(mode, r, eig, delta);
    Attempt a = attempt(build_spectral_relaxation(r, shift), config.qp, stats);
    if (a.valid && eigvec != nullptr && shift.alpha > 0.0) *eigvec = shift.eigvec;
    return a;
  } catch (const std::exception& e) {
    spdlog::debug("{} relaxation failed: {}", kind_name(mode), e.what());
    ++stats.not_converged;
    return {};
  }
}

bool inside_open_box(double x, double l, double u) { return x > l + 1e-9 && x < u - 1e-9; }

// At most kGradientSteps projected-gradient steps on the true objective over
// the box, moving only `movable`, then one stationarity solve on the face of
// coordinates strictly inside the box.
void local_descent(const Problem& p, VectorXd& x, const std::vector<int>& movable) {
  if (movable.empty()) return;
  const MatrixXd qmm = p.Q()(movable, movable);
  double lip = 2.0 * qmm.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(lip > 1e-12)) lip = 1e-12;
  for (int step = 0; step < kGradientSteps; ++step) {
    const VectorXd g = 2.0 * (p.Q() * x) + p.q();
    double moved = 0.0;
    for (int i : movable) {
      const double next = std::clamp(x(i) - g(i) / lip, p.lower()(i), p.upper()(i));
      moved = std::max(moved, std::abs(next - x(i)));
      x(i) = next;
    }
    if (moved < 1e-14) break;
  }

  std::vector<int> face;
  for (int i : movable) {
    if (inside_open_box(x(i), p.lower()(i), p.upper()(i))) face.push_back(i);
  }
  if (face.empty()) return;
  const Eigen::LLT<MatrixXd> llt(2.0 * p.Q()(face, face));
  if (llt.info() != Eigen::Success) return;
  const VectorXd g = 2.0 * (p.Q() * x) + p.q();
  VectorXd trial = x;
  trial(face) = x(face) - llt.solve(g(face));
  for (int i : face) {
    if (trial(i) < p.lower()(i) - 1e-12 || trial(i) > p.upper()(i) + 1e-12) return;
    trial(i) = std::clamp(trial(i), p.lower()(i), p.upper()(i));
  }
  if (evaluate_objective(p, trial) <= evaluate_objective(p, x)) x = trial;
}

std::vector<int> continuous_indices(const Problem& p, const NodeRestriction& node) {
  std::vector<int> out;
  for (int i : node.free) {
    if (!p.is_integer(i)) out.push_back(i);
  }
  return out;
}

// Sum of all variables equal to a constant, the only constraint row.
bool is_cardinality_row(const Problem& p) {
  return p.is_pure_binary() && p.num_equalities() == 1 && (p.A().row(0).array() == 1.0).all();
}

struct Node {
  VectorXd lo;
  VectorXd hi;
  double bound = -kInf;
  int depth = 0;
  long id = 0;
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class Solver {
 public:
  Solver(const Problem& p, const SolverConfig& c) : p_(p), cfg_(c) {}

  SolveResult run();

 private:
  void offer(const VectorXd& x, double value) {
    if (value < res_.f_ubd) {
      res_.f_ubd = value;
      res_.x = x;
      spdlog::debug("incumbent {:.10g} at node {}", value, res_.nodes);
    }
  }
  bool fathomable(double bound) const {
    if (res_.f_ubd == kInf || !std::isfinite(bound)) return false;
    const double gap = res_.f_ubd - bound;
    return gap <= cfg_.abs_tol || gap <= cfg_.rel_tol * std::max(std::abs(bound), 1e-3);
  }
  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  void prune(double bound) { pruned_min_ = std::min(pruned_min_, bound); }
  void record(const TraceRecord& rec) {
    spdlog::debug("{}", rec.to_json());
    if (cfg_.record_trace) res_.trace.push_back(rec);
  }
  void multistart();
  void process(const Node& node);
  void push_child(const Node& parent, double bound, int var, double lo, double hi);

  const Problem& p_;
  const SolverConfig& cfg_;
  SolveResult res_;
  SelectionState selection_;
  double delta_ = 1.0;
  double pruned_min_ = kInf;
  long next_id_ = 0;
  std::priority_queue<Node, std::vector<Node>, WorseNode> open_;
  std::chrono::steady_clock::time_point start_;
};

void Solver::multistart() {
  NodeRestriction root = make_restriction(p_.lower(), p_.upper());
  const std::vector<int> movable = continuous_indices(p_, root);
  if (movable.empty() || p_.has_integers()) return;
  std::mt19937_64 rng(cfg_.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int start = 0; start < kMultistarts; ++start) {
    VectorXd x = p_.lower();
    for (int i : movable) x(i) = p_.lower()(i) + unit(rng) * (p_.upper()(i) - p_.lower()(i));
    local_descent(p_, x, movable);
    if (check_feasibility(p_, x, kFeasTol, kFeasTol).feasible) offer(x, evaluate_objective(p_, x));
  }
}

void Solver::push_child(const Node& parent, double bound, int var, double lo, double hi) {
  Node child{parent.lo, parent.hi, bound, parent.depth + 1, next_id_++};
  child.lo(var) = lo;
  child.hi(var) = hi;
  open_.push(std::move(child));
}

void Solver::process(const Node& node) {
  ++res_.nodes;
  const NodeRestriction nr = make_restriction(node.lo, node.hi);
  const RestrictedProblem r = restrict(p_, nr);
  TraceRecord rec{node.id, node.depth, node.bound, "", -1};

  if (r.n() == 0) {
    const VectorXd x = expand_point(nr, VectorXd(0), p_.n());
    if (check_feasibility(p_, x, kFeasTol, kFeasTol).feasible) {
      rec.bound = evaluate_objective(p_, x);
      rec.kind = "LEAF";
      offer(x, rec.bound);
      prune(rec.bound);
    } else {
      rec.kind = "INFEASIBLE";
    }
    record(rec);
    return;
  }

  std::vector<int> int_pos, cont_pos;
  for (int k = 0; k < r.n(); ++k) {
    (p_.is_integer(r.free[static_cast<std::size_t>(k)]) ? int_pos : cont_pos).push_back(k);
  }
  if (int_pos.empty() && (r.upper - r.lower).maxCoeff() <= kGuardDiameter) {
    const VectorXd x = expand_point(nr, 0.5 * (r.lower + r.upper), p_.n());
    rec.bound = evaluate_objective(p_, x);
    rec.kind = "GUARD";
    if (check_feasibility(p_, x, kFeasTol, kFeasTol).feasible) offer(x, rec.bound);
    prune(rec.bound);
    record(rec);
    return;
  }

  const NodeBound nb = lower_bound(r, cfg_, delta_, node.bound, selection_, res_.stats);
  if (node.id == 0) res_.root_bound = nb.infeasible ? kInf : nb.value;
  rec.kind = nb.kind;
  if (nb.infeasible) {
    record(rec);
    return;
  }
  const double bound = std::max(nb.value, node.bound);
  rec.bound = bound;

  if (nb.x.size() == r.n()) {
    if (auto cand = upper_bound_heuristic(p_, nr, nb.x, res_.f_ubd)) offer(cand->x, cand->value);
  }
  // A continuous node bounded by its own convex relaxation is solved.
  if (fathomable(bound) || (int_pos.empty() && nb.kind == "PLAIN")) {
    prune(bound);
    record(rec);
    return;
  }

  const VectorXd x = nb.x.size() == r.n() ? VectorXd(nb.x.cwiseMax(r.lower).cwiseMin(r.upper))
                                          : VectorXd(0.5 * (r.lower + r.upper));
  auto original = [&](int pos) { return r.free[static_cast<std::size_t>(pos)]; };
  auto split_integer = [&](int pos, double at) {
    const int var = original(pos);
    const double f = std::floor(at);
    push_child(node, bound, var, r.lower(pos), f);
    push_child(node, bound, var, f + 1.0, r.upper(pos));
    return var;
  };
  auto split_widest = [&](const std::vector<int>& positions, bool integral) {
    int best = positions.front();
    for (int k : positions) {
      if (r.upper(k) - r.lower(k) > r.upper(best) - r.lower(best)) best = k;
    }
    const double mid = 0.5 * (r.lower(best) + r.upper(best));
    if (integral) return split_integer(best, mid);
    push_child(node, bound, original(best), r.lower(best), mid);
    push_child(node, bound, original(best), mid, r.upper(best));
    return original(best);
  };

  int var = -1;
  if (!int_pos.empty()) {
    const bool binary_only =
        cont_pos.empty() && std::all_of(int_pos.begin(), int_pos.end(), [&](int k) {
          return r.lower(k) == 0.0 && r.upper(k) == 1.0;
        });
    const bool spectral = cfg_.branch != BranchRule::kFractional && binary_only && !nb.convex &&
                          int_pos.size() >= 2;
    if (spectral) {
      const std::vector<int> positions = int_pos;
      int pos = -1;
      if (cfg_.branch == BranchRule::kExact) {
        pos = spectral_branch_exact(r.Q, positions);
      } else if (cfg_.branch == BranchRule::kGct) {
        pos = spectral_branch_gct(r.Q, positions);
      } else if (nb.eigvec.size() == r.n() && nb.eigvec.cwiseAbs().maxCoeff() > 0.0) {
        pos = spectral_branch_approx(nb.eigvec, positions);
      }
      if (pos >= 0) var = split_integer(pos, 0.5);
    }
    if (var < 0) {
      if (auto pos = most_fractional_branch(x, int_pos)) {
        var = split_integer(*pos, x(*pos));
      } else if (!cont_pos.empty() && !nb.convex) {
        if (auto d = spatial_branch(r, x, nb.alpha, cont_pos)) {
          var = d->variable;
          const auto it = std::find(r.free.begin(), r.free.end(), var);
          const auto pos = static_cast<int>(it - r.free.begin());
          push_child(node, bound, var, r.lower(pos), d->split);
          push_child(node, bound, var, d->split, r.upper(pos));
        } else {
          var = split_widest(cont_pos, false);
        }
      } else {
        var = split_widest(int_pos, true);
      }
    }
  } else if (auto d = spatial_branch(r, x, nb.alpha, cont_pos)) {
    var = d->variable;
    const auto pos = static_cast<int>(std::find(r.free.begin(), r.free.end(), var) - r.free.begin());
    push_child(node, bound, var, r.lower(pos), d->split);
    push_child(node, bound, var, d->split, r.upper(pos));
  } else {
    var = split_widest(cont_pos, false);
  }
  rec.branch_variable = var;
  record(rec);
}

SolveResult Solver::run() {
  start_ = std::chrono::steady_clock::now();
  if ((cfg_.relax == RelaxMode::kEigzApprox || cfg_.relax == RelaxMode::kAuto) &&
      p_.num_equalities() > 0) {
    const RestrictedProblem root = restrict(p_, make_restriction(p_.lower(), p_.upper()));
    if (root.n() > 0 && root.A.rows() > 0) {
      try {
        delta_ = compute_shift_eigz_approx(root.Q, root.A, cfg_.delta).delta;
      } catch (const LinalgError& e) {
        spdlog::warn("delta search failed, using delta = 1: {}", e.what());
      }
    }
  }
  res_.delta = delta_;
  multistart();
  open_.push(Node{p_.lower(), p_.upper(), -kInf, 0, next_id_++});

  res_.status = SolveStatus::kOptimal;
  while (!open_.empty()) {
    if (elapsed_s() >= cfg_.time_limit) {
      res_.status = SolveStatus::kTimeLimit;
      break;
    }
    if (res_.nodes >= cfg_.node_limit) {
      res_.status = SolveStatus::kNodeLimit;
      break;
    }
    const Node node = open_.top();
    open_.pop();
    if (fathomable(node.bound)) {
      prune(node.bound);
      continue;
    }
    process(node);
  }

  double lbd = pruned_min_;
  if (!open_.empty()) lbd = std::min(lbd, open_.top().bound);
  res_.f_lbd = std::min(lbd, res_.f_ubd);
  if (res_.status == SolveStatus::kOptimal && res_.f_ubd == kInf) res_.status = SolveStatus::kInfeasible;
  res_.gap = relative_gap(res_.f_ubd, res_.f_lbd);
  res_.wall_ms = elapsed_s() * 1e3;
  spdlog::debug("{}: f_ubd {:.10g} f_lbd {:.10g} gap {:.3g}% nodes {} ({:.1f} ms)",
               to_string(res_.status), res_.f_ubd, res_.f_lbd, res_.gap, res_.nodes, res_.wall_ms);
  return std::move(res_);
}

}  // namespace

std::string to_string(RelaxMode mode) {
  switch (mode) {
    case RelaxMode::kEig: return "eig";
    case RelaxMode::kGeig: return "geig";
    case RelaxMode::kEigzApprox: return "eigz";
    case RelaxMode::kMcCormick: return "mccormick";
    case RelaxMode::kSeparable: return "separable";
    case RelaxMode::kAuto: return "auto";
  }
  return "?";
}

std::string to_string(BranchRule rule) {
  switch (rule) {
    case BranchRule::kApprox: return "approx";
    case BranchRule::kGct: return "gct";
    case BranchRule::kExact: return "exact";
    case BranchRule::kFractional: return "fractional";
    case BranchRule::kAuto: return "auto";
  }
  return "?";
}

RelaxMode relax_mode_from_string(std::string_view name) {
  if (name == "eig") return RelaxMode::kEig;
  if (name == "geig") return RelaxMode::kGeig;
  if (name == "eigz" || name == "eigz_approx") return RelaxMode::kEigzApprox;
  if (name == "mccormick") return RelaxMode::kMcCormick;
  if (name == "separable") return RelaxMode::kSeparable;
  if (name == "auto") return RelaxMode::kAuto;
  throw std::invalid_argument(fmt::format("unknown relaxation '{}'", name));
}

BranchRule branch_rule_from_string(std::string_view name) {
  if (name == "approx") return BranchRule::kApprox;
  if (name == "gct") return BranchRule::kGct;
  if (name == "exact") return BranchRule::kExact;
  if (name == "fractional") return BranchRule::kFractional;
  if (name == "auto") return BranchRule::kAuto;
  throw std::invalid_argument(fmt::format("unknown branching rule '{}'", name));
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kTimeLimit: return "TimeLimit";
    case SolveStatus::kNodeLimit: return "NodeLimit";
    case SolveStatus::kInfeasible: return "Infeasible";
  }
  return "?";
}

std::string TraceRecord::to_json() const {
  const std::string b = std::isfinite(bound) ? fmt::format("{:.17g}", bound) : "null";
  const std::string v = branch_variable >= 0 ? std::to_string(branch_variable + 1) : "null";
  return fmt::format(R"({{"id":{},"depth":{},"bound":{},"kind":"{}","branch":{}}})", id, depth, b,
                     kind, v);
}

SelectionState dynamic_selection_update(SelectionState s, double f_lp, double f_qp,
                                        const SelectionParams& params) {
  if (f_qp - f_lp >= params.abs_tol) {
    s.omega_qp = std::max(1.0, s.omega_qp / params.sigma_qp);
    s.omega_lp = std::min(params.omega_lp_max, s.omega_lp * params.sigma_lp);
  } else {
    s.omega_lp = std::max(1.0, s.omega_lp / params.sigma_lp);
    s.omega_qp = std::min(params.omega_qp_max, s.omega_qp * params.sigma_qp);
  }
  return s;
}

double relative_gap(double f_ubd, double f_lbd) {
  if (!std::isfinite(f_ubd) || !std::isfinite(f_lbd)) return kInf;
  return 100.0 * (f_ubd - f_lbd) / std::max(std::abs(f_lbd), 1e-3);
}

NodeBound lower_bound(const RestrictedProblem& r, const SolverConfig& config, double root_delta,
                      double parent_bound, SelectionState& selection, SolveStats& stats) {
  NodeBound out;
  const SpectralShift eig = compute_shift_eig(r.Q);
  out.alpha = eig.alpha;
  out.eigvec = eig.eigvec;
  const bool convex = eig.lambda_raw >= -kConvexTol;
  bool null_convex = false;
  if (!convex && r.A.rows() > 0) {
    const MatrixXd z = nullspace_basis(r.A);
    null_convex = z.cols() == 0 ||
                  sym_eigenvalues(SymMatrix::symmetrized(z.transpose() * r.Q.dense() * z))(0) >=
                      -kConvexTol;
  }
  out.convex = convex || null_convex;

  Attempt best;
  bool tried_mccormick = false;
  bool tried_qp = false;
  const RelaxMode qp_mode = config.relax == RelaxMode::kGeig || config.relax == RelaxMode::kEig
                                ? config.relax
                                : (r.A.rows() > 0 ? RelaxMode::kEigzApprox : RelaxMode::kEig);
  auto take = [&](const Attempt& a, const std::string& kind) {
    if (a.infeasible) out.infeasible = true;
    if (a.valid && a.value > best.value) {
      // The QP point is kept for heuristics when both are valid.
      const VectorXd keep = best.x.size() > 0 && kind == "MCCORMICK" ? best.x : a.x;
      best = a;
      best.x = keep;
      out.kind = kind;
    } else if (a.valid && best.x.size() == 0) {
      best.x = a.x;
    }
  };

  // Fixed modes keep their relaxation on nodes that are only convex on null(A).
  if (convex || (null_convex && config.relax == RelaxMode::kAuto)) {
    try {
      take(attempt(build_plain_relaxation(r, !convex), config.qp, stats), "PLAIN");
    } catch (const std::exception& e) {
      spdlog::debug("plain relaxation failed: {}", e.what());
    }
  } else if (config.relax == RelaxMode::kAuto) {
    ++selection.since_lp;
    ++selection.since_qp;
    const bool lp_due = static_cast<double>(selection.since_lp) >= selection.omega_lp;
    const bool qp_due = static_cast<double>(selection.since_qp) >= selection.omega_qp || !lp_due;
    Attempt qp, lp;
    if (qp_due) {
      qp = bound_with(qp_mode, r, eig, root_delta, config, stats, &out.eigvec);
      selection.since_qp = 0;
      tried_qp = true;
      take(qp, kind_name(qp_mode));
    }
    if (lp_due && !out.infeasible) {
      lp = bound_with(RelaxMode::kMcCormick, r, eig, root_delta, config, stats, nullptr);
      selection.since_lp = 0;
      tried_mccormick = true;
      take(lp, "MCCORMICK");
    }
    if (qp.valid && lp.valid) {
      selection = dynamic_selection_update(selection, lp.value, qp.value, config.selection);
    }
  } else {
    take(bound_with(config.relax, r, eig, root_delta, config, stats, &out.eigvec),
         kind_name(config.relax));
    tried_mccormick = config.relax == RelaxMode::kMcCormick;
    tried_qp = config.relax == qp_mode;
  }
  if (out.infeasible) return out;

  if (!best.valid && !tried_qp) {
    ++stats.fallbacks;
    take(bound_with(qp_mode, r, eig, root_delta, config, stats, &out.eigvec), kind_name(qp_mode));
    if (out.infeasible) return out;
  }
  if (!best.valid && !tried_mccormick) {
    ++stats.fallbacks;
    take(bound_with(RelaxMode::kMcCormick, r, eig, root_delta, config, stats, nullptr),
         "MCCORMICK");
    if (out.infeasible) return out;
  }
  if (!best.valid) {
    ++stats.parent_bounds;
    out.kind = "PARENT";
    out.value = parent_bound;
    return out;
  }
  out.value = best.value;
  out.x = best.x;
  return out;
}

std::optional<RootBound> root_relaxation_bound(const Problem& problem, RelaxMode kind,
                                               const DeltaParams& params, const QpSettings& qp) {
  if (kind == RelaxMode::kAuto) throw std::invalid_argument("root bound needs a single relaxation");
  const NodeRestriction nr = make_restriction(problem.lower(), problem.upper());
  const RestrictedProblem r = restrict(problem, nr);
  RootBound out;
  if (r.n() == 0) {
    out.value = evaluate_objective(problem, expand_point(nr, VectorXd(0), problem.n()));
    return out;
  }
  SolverConfig config;
  config.qp = qp;
  SolveStats stats;
  const SpectralShift eig = compute_shift_eig(r.Q);
  out.alpha = eig.alpha;
  if (kind == RelaxMode::kEigzApprox && r.A.rows() > 0) {
    const SpectralShift s = compute_shift_eigz_approx(r.Q, r.A, params);
    out.delta = s.delta;
    out.alpha = s.alpha;
  } else if (kind == RelaxMode::kGeig) {
    out.alpha = compute_shift_geig(r.Q, r.A).alpha;
  }
  const Attempt a = bound_with(kind, r, eig, out.delta, config, stats, nullptr);
  if (a.infeasible) {
    out.value = kInf;
    return out;
  }
  if (!a.valid) return std::nullopt;
  out.value = a.value;
  return out;
}

std::optional<Candidate> upper_bound_heuristic(const Problem& p, const NodeRestriction& node,
                                               const VectorXd& relax_free, double incumbent) {
  const int n = p.n();
  const VectorXd base =
      expand_point(node, relax_free.cwiseMax(node.lower).cwiseMin(node.upper), n);
  std::vector<VectorXd> points{base};

  if (p.has_integers()) {
    VectorXd rounded = base;
    for (int i : p.integers()) rounded(i) = std::clamp(std::round(base(i)), p.lower()(i), p.upper()(i));
    points.push_back(rounded);

    if (is_cardinality_row(p)) {
      double k = p.b()(0);
      for (std::size_t f = 0; f < node.fixed.size(); ++f) k -= node.fixed_values(static_cast<Eigen::Index>(f));
      const long kk = std::lround(k);
      if (std::abs(k - static_cast<double>(kk)) < 1e-9 && kk >= 0 &&
          kk <= static_cast<long>(node.free.size())) {
        std::vector<int> order = node.free;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return base(a) > base(b); });
        VectorXd top = base;
        for (std::size_t t = 0; t < order.size(); ++t) top(order[t]) = t < static_cast<std::size_t>(kk) ? 1.0 : 0.0;
        points.push_back(top);
      }
    }
  }

  const std::vector<int> movable = continuous_indices(p, node);
  if (!movable.empty()) {
    VectorXd y = points.back();
    local_descent(p, y, movable);
    points.push_back(y);
  }

  std::optional<Candidate> best;
  double best_value = incumbent;
  for (const VectorXd& x : points) {
    if (!check_feasibility(p, x, kFeasTol, kFeasTol).feasible) continue;
    const double value = evaluate_objective(p, x);
    if (value < best_value) {
      best_value = value;
      best = Candidate{x, value};
    }
  }
  return best;
}

SolveResult solve(const Problem& problem, const SolverConfig& config) {
  Solver solver(problem, config);
  return solver.run();
}

}  // namespace smiqp
