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

#include <doctest.h>

#include <cmath>
#include <random>

#include "smiqp/oracle.hpp"

using namespace smiqp;

namespace {

Problem binary(MatrixXd Q, MatrixXd A = {}, VectorXd b = {}) {
  ProblemData raw;
  const auto n = Q.rows();
  raw.q = VectorXd::Zero(n);
  raw.Q = std::move(Q);
  raw.lower = VectorXd::Zero(n);
  raw.upper = VectorXd::Ones(n);
  raw.A = std::move(A);
  raw.b = std::move(b);
  for (int i = 0; i < n; ++i) raw.integers.push_back(i);
  return Problem::validate(std::move(raw));
}

Problem box(MatrixXd Q, VectorXd q, VectorXd lo, VectorXd hi) {
  ProblemData raw;
  raw.Q = std::move(Q);
  raw.q = std::move(q);
  raw.lower = std::move(lo);
  raw.upper = std::move(hi);
  return Problem::validate(std::move(raw));
}

MatrixXd mat2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("binary enumeration") {
  const OracleResult r = enumerate_binary(binary(mat2(2, -3, -3, 2)));
  CHECK(r.value == doctest::Approx(-2));
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0] == Eigen::Vector2d(1, 1));
  CHECK(r.candidates == 4);

  const MatrixXd a = MatrixXd::Ones(1, 2);
  const OracleResult card = enumerate_binary(binary(mat2(0, 1, 1, 0), a, VectorXd::Ones(1)));
  CHECK(card.value == 0.0);
  CHECK(card.points.size() == 2);

  const OracleResult none = enumerate_binary(binary(mat2(0, 1, 1, 0), a, VectorXd::Constant(1, 3)));
  CHECK_FALSE(none.feasible());
  CHECK(std::isinf(none.value));

  CHECK_THROWS(enumerate_binary(binary(MatrixXd::Identity(21, 21))));
  CHECK_THROWS(enumerate_binary(box(MatrixXd::Identity(1, 1), VectorXd::Zero(1), VectorXd::Zero(1),
                                    VectorXd::Ones(1))));
}

TEST_CASE("box KKT enumeration") {
  const Problem concave = box(MatrixXd::Constant(1, 1, -1), VectorXd::Zero(1),
                              VectorXd::Constant(1, -1), VectorXd::Constant(1, 2));
  OracleResult r = enumerate_box_kkt(concave);
  CHECK(r.value == doctest::Approx(-4));
  CHECK(r.points[0](0) == 2.0);
  CHECK(r.candidates == 3);

  r = enumerate_box_kkt(box(MatrixXd::Ones(1, 1), VectorXd::Constant(1, -1), VectorXd::Zero(1),
                            VectorXd::Ones(1)));
  CHECK(r.value == doctest::Approx(-0.25));
  CHECK(r.points[0](0) == doctest::Approx(0.5));

  r = enumerate_box_kkt(box(mat2(0, 1, 1, 0), VectorXd::Zero(2), VectorXd::Zero(2), VectorXd::Ones(2)));
  CHECK(r.value == doctest::Approx(0).epsilon(1e-12));
  CHECK(r.candidates == 9);

  CHECK_THROWS(enumerate_box_kkt(box(MatrixXd::Identity(9, 9), VectorXd::Zero(9), VectorXd::Zero(9),
                                     VectorXd::Ones(9))));
  CHECK_THROWS(enumerate_box_kkt(binary(mat2(1, 0, 0, 1))));
}

TEST_CASE("box KKT enumeration against a dense grid") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd q2(2, 2);
    q2 << coef(rng), 0, 0, coef(rng);
    q2(0, 1) = q2(1, 0) = coef(rng);
    const Problem p = box(q2, Eigen::Vector2d(coef(rng), coef(rng)), Eigen::Vector2d(-1, 0),
                          Eigen::Vector2d(1, 2));
    const double value = enumerate_box_kkt(p).value;
    double grid = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 200; ++i) {
      for (int j = 0; j <= 200; ++j) {
        grid = std::min(grid, evaluate_objective(p, Eigen::Vector2d(-1 + 2.0 * i / 200, 2.0 * j / 200)));
      }
    }
    CHECK(value <= grid + 1e-12);
    CHECK(value >= grid - 0.05);
  }
}

TEST_CASE("rayleigh probe") {
  SymMatrix off(2);
  off.set(0, 1, 1.0);
  const double v = rayleigh_probe_min(off, SymMatrix(), 1000, 3);
  CHECK(v >= -1.0);
  CHECK(v <= 1.0);
  CHECK(v < -0.99);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd b(5, 5);
    for (auto& x : b.reshaped()) x = g(rng);
    const SymMatrix psd = SymMatrix::symmetrized(b * b.transpose());
    CHECK(rayleigh_probe_min(psd, SymMatrix(), 200, trial) >= -1e-12);
    const SymMatrix m = SymMatrix::symmetrized(b);
    CHECK(sym_eig_min(m).value <= rayleigh_probe_min(m, SymMatrix(), 1000, trial) + 1e-12);
    const SymMatrix n = SymMatrix::symmetrized(MatrixXd::Identity(5, 5) + b.transpose() * b);
    CHECK(gen_eig_min(m, n).value <= rayleigh_probe_min(m, n, 1000, trial) + 1e-12);
  }
}
