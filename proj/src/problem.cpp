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

#include "smiqp/problem.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace smiqp {
namespace {

constexpr double kAsymmetryWarn = 1e-12;

void require_finite(const MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw ProblemError(fmt::format("non-finite entry in {}", what));
}

// Accepts an empty (0x0) block as "no rows" and reshapes it to 0 x n.
void normalize_rows(MatrixXd& M, VectorXd& rhs, int n, const char* mname,
                    const char* vname) {
  if (M.size() == 0 && rhs.size() == 0) {
    M.resize(0, n);
    rhs.resize(0);
    return;
  }
  if (M.cols() != n) {
    throw ProblemError(fmt::format("dimension mismatch: {} has {} columns, expected {}",
                                   mname, M.cols(), n));
  }
  if (M.rows() != rhs.size()) {
    throw ProblemError(fmt::format("dimension mismatch: {} has {} rows but {} has {} entries",
                                   mname, M.rows(), vname, rhs.size()));
  }
}

}  // namespace

Problem::Problem(ProblemData data) : data_(std::move(data)) {
  integer_mask_.assign(static_cast<std::size_t>(n()), false);
  for (int i : data_.integers) integer_mask_[static_cast<std::size_t>(i)] = true;
}

Problem Problem::validate(ProblemData raw, std::vector<std::string>* warnings) {
  const auto n = static_cast<int>(raw.q.size());
  if (n < 1) throw ProblemError("dimension mismatch: instance needs at least one variable");
  if (raw.Q.rows() != n || raw.Q.cols() != n) {
    throw ProblemError(fmt::format("dimension mismatch: Q is {}x{}, expected {}x{}",
                                   raw.Q.rows(), raw.Q.cols(), n, n));
  }
  if (raw.lower.size() != n || raw.upper.size() != n) {
    throw ProblemError("dimension mismatch: bound vectors must have n entries");
  }
  normalize_rows(raw.A, raw.b, n, "A", "b");
  normalize_rows(raw.C, raw.d, n, "C", "d");

  require_finite(raw.Q, "Q");
  require_finite(raw.q, "q");
  require_finite(raw.A, "A");
  require_finite(raw.b, "b");
  require_finite(raw.C, "C");
  require_finite(raw.d, "d");
  if (!std::isfinite(raw.offset)) throw ProblemError("non-finite objective offset");

  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(raw.lower(i)) || !std::isfinite(raw.upper(i))) {
      throw ProblemError(fmt::format("non-finite bound at index {}", i + 1));
    }
    if (raw.lower(i) >= raw.upper(i)) {
      throw ProblemError(fmt::format("lower bound {} >= upper bound {} at index {}",
                                     raw.lower(i), raw.upper(i), i + 1));
    }
  }

  for (int j : raw.integers) {
    if (j < 0 || j >= n) {
      throw ProblemError(fmt::format("integer index {} out of range 1..{}", j + 1, n));
    }
  }
  std::sort(raw.integers.begin(), raw.integers.end());
  raw.integers.erase(std::unique(raw.integers.begin(), raw.integers.end()),
                     raw.integers.end());

  const double asym = (raw.Q - raw.Q.transpose()).cwiseAbs().maxCoeff();
  if (asym > kAsymmetryWarn && warnings != nullptr) {
    warnings->push_back(
        fmt::format("Q is not symmetric (max |Q - Q'| = {:g}); using (Q + Q')/2", asym));
  }
  MatrixXd sym = 0.5 * (raw.Q + raw.Q.transpose());
  raw.Q = std::move(sym);

  return Problem(std::move(raw));
}

bool Problem::is_pure_binary() const {
  if (static_cast<int>(data_.integers.size()) != n()) return false;
  for (int i = 0; i < n(); ++i) {
    if (data_.lower(i) != 0.0 || data_.upper(i) != 1.0) return false;
  }
  return true;
}

double evaluate_objective(const Problem& problem, const VectorXd& x) {
  if (x.size() != problem.n()) {
    throw ProblemError(fmt::format("point has length {}, expected {}", x.size(), problem.n()));
  }
  return x.dot(problem.Q() * x) + problem.q().dot(x) + problem.offset();
}

FeasibilityReport check_feasibility(const Problem& problem, const VectorXd& x,
                                    double tol_eq, double tol_int) {
  if (x.size() != problem.n()) {
    throw ProblemError(fmt::format("point has length {}, expected {}", x.size(), problem.n()));
  }
  FeasibilityReport r;
  if (problem.num_equalities() > 0) {
    r.equality_residual = (problem.A() * x - problem.b()).cwiseAbs().maxCoeff();
  }
  if (problem.num_inequalities() > 0) {
    r.inequality_violation =
        std::max(0.0, (problem.C() * x - problem.d()).maxCoeff());
  }
  for (int i = 0; i < problem.n(); ++i) {
    r.bound_violation = std::max(
        {r.bound_violation, problem.lower()(i) - x(i), x(i) - problem.upper()(i)});
  }
  for (int i : problem.integers()) {
    r.integrality_deviation =
        std::max(r.integrality_deviation, std::abs(x(i) - std::round(x(i))));
  }
  r.feasible = r.equality_residual <= tol_eq && r.inequality_violation <= tol_eq &&
               r.bound_violation <= tol_eq && r.integrality_deviation <= tol_int;
  return r;
}

}  // namespace smiqp
