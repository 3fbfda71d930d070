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

#include "smiqp/oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace smiqp {
namespace {

constexpr double kTol = 1e-9;

void consider(OracleResult& out, const VectorXd& x, double value) {
  if (value < out.value - kTol) {
    out.value = value;
    out.points.clear();
    out.points.push_back(x);
  } else if (value <= out.value + kTol) {
    out.value = std::min(out.value, value);
    out.points.push_back(x);
  }
}

}  // namespace

OracleResult enumerate_binary(const Problem& problem) {
  const int n = problem.n();
  if (n > 20) throw std::invalid_argument(fmt::format("binary enumeration limited to n <= 20 (got {})", n));
  if (!problem.is_pure_binary()) throw std::invalid_argument("binary enumeration needs a pure binary problem");
  OracleResult out;
  VectorXd x(n);
  for (long mask = 0; mask < (1L << n); ++mask) {
    for (int i = 0; i < n; ++i) x(i) = static_cast<double>((mask >> i) & 1L);
    ++out.candidates;
    if (problem.num_equalities() > 0 && ((problem.A() * x - problem.b()).cwiseAbs().maxCoeff() > kTol)) continue;
    if (problem.num_inequalities() > 0 && ((problem.C() * x - problem.d()).maxCoeff() > kTol)) continue;
    consider(out, x, evaluate_objective(problem, x));
  }
  return out;
}

OracleResult enumerate_box_kkt(const Problem& problem) {
  const int n = problem.n();
  if (n > 8) throw std::invalid_argument(fmt::format("KKT enumeration limited to n <= 8 (got {})", n));
  if (problem.num_equalities() > 0 || problem.num_inequalities() > 0 || problem.has_integers()) {
    throw std::invalid_argument("KKT enumeration needs a continuous box-constrained problem");
  }
  const MatrixXd& q2 = problem.Q();
  const VectorXd& l = problem.lower();
  const VectorXd& u = problem.upper();
  long patterns = 1;
  for (int i = 0; i < n; ++i) patterns *= 3;

  OracleResult out;
  VectorXd x(n);
  std::vector<int> free, bound;
  for (long code = 0; code < patterns; ++code) {
    ++out.candidates;
    free.clear();
    bound.clear();
    long c = code;
    for (int i = 0; i < n; ++i, c /= 3) {
      const long state = c % 3;
      if (state == 2) {
        free.push_back(i);
      } else {
        x(i) = state == 0 ? l(i) : u(i);
        bound.push_back(i);
      }
    }
    if (!free.empty()) {
      const MatrixXd h = 2.0 * q2(free, free);
      VectorXd rhs = -problem.q()(free);
      if (!bound.empty()) rhs -= 2.0 * q2(free, bound) * x(bound);
      const VectorXd xf = Eigen::CompleteOrthogonalDecomposition<MatrixXd>(h).solve(rhs);
      if ((h * xf - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
      bool inside = true;
      for (std::size_t k = 0; k < free.size(); ++k) {
        const int i = free[k];
        const double v = xf(static_cast<Eigen::Index>(k));
        if (v < l(i) - kTol || v > u(i) + kTol) {
          inside = false;
          break;
        }
        x(i) = std::clamp(v, l(i), u(i));
      }
      if (!inside) continue;
    }
    consider(out, x, evaluate_objective(problem, x));
  }
  return out;
}

double rayleigh_probe_min(const SymMatrix& m, const SymMatrix& n, int trials, std::uint64_t seed) {
  const int t = m.order();
  if (trials < 1) throw std::invalid_argument("rayleigh probe needs at least one trial");
  if (n.order() != 0 && n.order() != t) throw std::invalid_argument("rayleigh probe with mismatched orders");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  VectorXd x(t);
  for (int k = 0; k < trials; ++k) {
    for (int i = 0; i < t; ++i) x(i) = gauss(rng);
    x.normalize();
    const double den = n.order() == 0 ? 1.0 : x.dot(n.dense() * x);
    best = std::min(best, x.dot(m.dense() * x) / den);
  }
  return best;
}

}  // namespace smiqp
