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

// Brute-force reference solvers for tests. Never used by the solver itself.

#ifndef SMIQP_ORACLE_HPP
#define SMIQP_ORACLE_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "smiqp/linalg.hpp"
#include "smiqp/problem.hpp"

namespace smiqp {

struct OracleResult {
  double value = std::numeric_limits<double>::infinity();  ///< +inf when nothing is feasible
  std::vector<VectorXd> points;  ///< all minimizers found (within 1e-9 of value)
  long candidates = 0;           ///< points (or patterns) examined
  bool feasible() const { return !points.empty(); }
};

/// All 2^n points of a pure binary problem, filtered at 1e-9. n <= 20.
OracleResult enumerate_binary(const Problem& problem);

/// All 3^n active-set patterns of a box-constrained problem (each coordinate
/// at l, at u, or free with zero gradient). Singular free blocks are solved
/// by least squares and skipped when the residual exceeds 1e-8. n <= 8.
OracleResult enumerate_box_kkt(const Problem& problem);

/// min over `trials` random unit x of x'Mx / x'Nx; an upper bound on the
/// smallest (generalized) eigenvalue. An empty N means the identity.
double rayleigh_probe_min(const SymMatrix& m, const SymMatrix& n, int trials, std::uint64_t seed);

}  // namespace smiqp

#endif  // SMIQP_ORACLE_HPP
