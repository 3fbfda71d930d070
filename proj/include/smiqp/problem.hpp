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

#ifndef SMIQP_PROBLEM_HPP
#define SMIQP_PROBLEM_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace smiqp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raised for malformed instance data: dimension mismatches, infinite
/// bounds, bad index sets, schema violations in input files.
class ProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unvalidated instance data. Indices in `integers` are 0-based.
///
///   min  x'Qx + q'x + offset
///   s.t. Ax = b, Cx <= d, lower <= x <= upper, x_i integral for i in integers
struct ProblemData {
  MatrixXd Q;
  VectorXd q;
  MatrixXd A;
  VectorXd b;
  MatrixXd C;
  VectorXd d;
  VectorXd lower;
  VectorXd upper;
  std::vector<int> integers;
  double offset = 0.0;
};

/// A validated MIQP instance. Immutable once constructed; the only way to
/// obtain one is `Problem::validate`, which establishes the invariants:
/// Q exactly symmetric, finite bounds with lower < upper, integer indices
/// in range (sorted, unique).
class Problem {
 public:
  /// Checks dimensions and bounds, symmetrizes Q. When Q is asymmetric by
  /// more than 1e-12 a message is appended to `warnings` (if given).
  static Problem validate(ProblemData raw,
                          std::vector<std::string>* warnings = nullptr);

  int n() const { return static_cast<int>(data_.q.size()); }
  int num_equalities() const { return static_cast<int>(data_.b.size()); }
  int num_inequalities() const { return static_cast<int>(data_.d.size()); }

  const MatrixXd& Q() const { return data_.Q; }
  const VectorXd& q() const { return data_.q; }
  const MatrixXd& A() const { return data_.A; }
  const VectorXd& b() const { return data_.b; }
  const MatrixXd& C() const { return data_.C; }
  const VectorXd& d() const { return data_.d; }
  const VectorXd& lower() const { return data_.lower; }
  const VectorXd& upper() const { return data_.upper; }
  const std::vector<int>& integers() const { return data_.integers; }
  double offset() const { return data_.offset; }
  const ProblemData& data() const { return data_; }

  bool is_integer(int i) const { return integer_mask_[static_cast<std::size_t>(i)]; }
  /// Every variable is integral with bounds [0, 1].
  bool is_pure_binary() const;
  bool has_integers() const { return !data_.integers.empty(); }

 private:
  explicit Problem(ProblemData data);

  ProblemData data_;
  std::vector<bool> integer_mask_;
};

/// x'Qx + q'x + offset. No 1/2 factor.
double evaluate_objective(const Problem& problem, const VectorXd& x);

struct FeasibilityReport {
  double equality_residual = 0.0;    ///< max_i |A_i x - b_i|
  double inequality_violation = 0.0; ///< max_i max(0, C_i x - d_i)
  double bound_violation = 0.0;      ///< max_i max(0, l_i - x_i, x_i - u_i)
  double integrality_deviation = 0.0;///< max over integers of |x_i - round(x_i)|
  bool feasible = false;
};

/// `tol_eq` applies to the equality, inequality and bound residuals,
/// `tol_int` to integrality.
FeasibilityReport check_feasibility(const Problem& problem, const VectorXd& x,
                                    double tol_eq, double tol_int);

// ---------------------------------------------------------------------------
// File formats

/// Parses the JSON instance schema. Quadratic entries are 1-based
/// `[i, j, v]` with i <= j and v = Q[i][j] (the (j, i) entry is implied).
Problem parse_json(std::string_view text,
                   std::vector<std::string>* warnings = nullptr);

/// Inverse of parse_json. Output is deterministic for a given instance.
std::string emit_json(const Problem& problem);

/// Reads the linear-constraint subset of the QPLIB format. QPLIB stores the
/// objective as 1/2 x'Q0x + b0'x; the internal Q is Q0 / 2.
Problem parse_qplib(std::string_view text,
                    std::vector<std::string>* warnings = nullptr);

// ---------------------------------------------------------------------------
// Random instances

enum class Family { kCbqp, kBoxQp, kEiqp };

std::string to_string(Family family);
Family family_from_string(std::string_view name);

struct GeneratorSpec {
  Family family = Family::kCbqp;
  int n = 10;
  double density = 0.5;     ///< off-diagonal fill of Q, in (0, 1]
  double coef_lo = -10.0;   ///< Q and q entries are uniform in [coef_lo, coef_hi]
  double coef_hi = 10.0;
  int cardinality = 3;      ///< CBQP: sum(x) == cardinality
  int equalities = 2;       ///< EIQP: number of equality rows
  int integer_upper = 10;   ///< EIQP: variables in [0, integer_upper]
  std::uint64_t seed = 0;
};

/// Pure function of `spec`: the same spec yields a bit-identical instance.
Problem generate_random(const GeneratorSpec& spec);

}  // namespace smiqp

#endif  // SMIQP_PROBLEM_HPP
