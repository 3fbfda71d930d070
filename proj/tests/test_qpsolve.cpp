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

#include "smiqp/qpsolve.hpp"

using namespace smiqp;

namespace {

ConvexQpModel box_model(MatrixXd Q, VectorXd q, VectorXd lo, VectorXd hi, double k = 0.0) {
  ConvexQpModel m;
  m.Q = std::move(Q);
  m.q = std::move(q);
  m.constant = k;
  m.lower = std::move(lo);
  m.upper = std::move(hi);
  m.num_x = m.n();
  m.A.resize(0, m.n());
  m.C.resize(0, m.n());
  return m;
}

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

MatrixXd random_psd(std::mt19937_64& rng, int n, int rank) {
  std::normal_distribution<double> g;
  MatrixXd b(n, rank);
  for (int i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
  return b * b.transpose();
}

// Exhaustive minimum of a convex QP over a box: every coordinate is at a
// bound or free, and the free block solves its stationarity system.
double brute_force_box(const ConvexQpModel& m) {
  const int n = m.n();
  int patterns = 1;
  for (int i = 0; i < n; ++i) patterns *= 3;
  double best = INFINITY;
  for (int code = 0; code < patterns; ++code) {
    std::vector<int> state(n);
    int c = code;
    std::vector<int> free;
    VectorXd x = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      state[i] = c % 3;
      c /= 3;
      if (state[i] == 0) x(i) = m.lower(i);
      if (state[i] == 1) x(i) = m.upper(i);
      if (state[i] == 2) free.push_back(i);
    }
    if (!free.empty()) {
      const int f = static_cast<int>(free.size());
      MatrixXd qff(f, f);
      VectorXd rhs(f);
      for (int a = 0; a < f; ++a) {
        rhs(a) = -m.q(free[a]);
        for (int j = 0; j < n; ++j) {
          if (state[j] != 2) rhs(a) -= 2 * m.Q(free[a], j) * x(j);
        }
        for (int b = 0; b < f; ++b) qff(a, b) = 2 * m.Q(free[a], free[b]);
      }
      const VectorXd xf = qff.completeOrthogonalDecomposition().solve(rhs);
      if ((qff * xf - rhs).norm() > 1e-8) continue;
      for (int a = 0; a < f; ++a) x(free[a]) = xf(a);
      if (((x - m.lower).array() < -1e-12).any() || ((m.upper - x).array() < -1e-12).any()) continue;
    }
    best = std::min(best, m.objective(x));
  }
  return best;
}

}  // namespace

TEST_CASE("one-dimensional quadratic with interior optimum") {
  MatrixXd Q(1, 1);
  Q << 1;
  const auto m = box_model(Q, vec({-2}), vec({0}), vec({2}), 1.0);
  const QpSolution s = solve_convex_qp(m);
  REQUIRE(s.status == QpStatus::kOptimal);
  CHECK(s.x(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(s.objective) < 1e-12);
  CHECK(verify_kkt(m, s).pass);
}

TEST_CASE("shifted bilinear model minimum") {
  MatrixXd Q(2, 2);
  Q << 1, 1, 1, 1;
  const auto m = box_model(Q, vec({-1, -1}), VectorXd::Zero(2), VectorXd::Ones(2));
  const QpSolution s = solve_convex_qp(m);
  REQUIRE(s.status == QpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(-0.25).epsilon(1e-9));
  CHECK(s.x.sum() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(verify_kkt(m, s, 1e-7).pass);
}

TEST_CASE("inconsistent equality over the box is infeasible") {
  auto m = box_model(MatrixXd::Zero(2, 2), VectorXd::Zero(2), VectorXd::Zero(2), VectorXd::Ones(2));
  m.A = MatrixXd::Ones(1, 2);
  m.b = vec({3});
  CHECK(solve_convex_qp(m).status == QpStatus::kInfeasible);
  m.nullspace_convex = true;
  CHECK(solve_convex_qp(m).status == QpStatus::kInfeasible);
}

TEST_CASE("linear programs") {
  auto m = box_model(MatrixXd::Zero(1, 1), vec({1}), vec({-1}), vec({1}));
  QpSolution s = solve_lp(m);
  REQUIRE(s.status == QpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(verify_kkt(m, s).pass);

  // x1 + x2 <= 0.5 and x1 + x2 >= 1 is empty.
  auto e = box_model(MatrixXd::Zero(2, 2), vec({1, 1}), VectorXd::Zero(2), VectorXd::Ones(2));
  e.C.resize(2, 2);
  e.C << 1, 1, -1, -1;
  e.d = vec({0.5, -1});
  CHECK(solve_lp(e).status == QpStatus::kInfeasible);

  CHECK_THROWS(solve_lp(box_model(MatrixXd::Identity(1, 1), vec({0}), vec({0}), vec({1}))));
}

TEST_CASE("KKT checker on hand-built points") {
  MatrixXd Q(1, 1);
  Q << 1;
  const auto m = box_model(Q, vec({-2}), vec({0}), vec({2}), 1.0);
  QpSolution s;
  s.x = vec({1});
  s.nu.resize(0);
  s.mu.resize(0);
  s.pi_lower = vec({0});
  s.pi_upper = vec({0});
  KktReport r = verify_kkt(m, s);
  CHECK(r.pass);
  CHECK(r.stationarity == 0.0);
  s.x = vec({0.5});
  r = verify_kkt(m, s);
  CHECK_FALSE(r.pass);
  CHECK(r.stationarity == doctest::Approx(1.0));

  const auto lp = box_model(MatrixXd::Zero(1, 1), vec({1}), vec({0}), vec({1}));
  s.x = vec({0});
  s.pi_lower = vec({1});
  r = verify_kkt(lp, s);
  CHECK(r.pass);
  CHECK(r.complementarity == 0.0);
}

TEST_CASE("random convex box QPs match exhaustive active-set enumeration") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 80; ++trial) {
    const int n = 1 + trial % 5;
    const MatrixXd Q = random_psd(rng, n, 1 + trial % n);
    VectorXd q(n), lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      q(i) = u(rng);
      lo(i) = u(rng) - 5;
      hi(i) = lo(i) + 0.5 + std::abs(u(rng));
    }
    const auto m = box_model(Q, q, lo, hi);
    const QpSolution s = solve_convex_qp(m);
    REQUIRE(s.status == QpStatus::kOptimal);
    CHECK(s.objective == doctest::Approx(brute_force_box(m)).epsilon(1e-7).scale(1.0));
    CHECK(verify_kkt(m, s, 1e-7).pass);
  }
}

TEST_CASE("constrained QPs: KKT, lower bound over random feasible points, reduced agrees with full") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + trial % 6;
    const int me = 1 + trial % 2;
    const int mi = trial % 3;
    auto m = box_model(random_psd(rng, n, 1 + trial % n), VectorXd::Zero(n), VectorXd::Zero(n),
                       VectorXd::Ones(n));
    for (int i = 0; i < n; ++i) m.q(i) = 3 * u(rng);
    VectorXd witness(n);
    for (int i = 0; i < n; ++i) witness(i) = unit(rng);
    m.A.resize(me, n);
    for (int i = 0; i < m.A.size(); ++i) m.A.data()[i] = u(rng);
    m.b = m.A * witness;
    m.C.resize(mi, n);
    for (int i = 0; i < m.C.size(); ++i) m.C.data()[i] = u(rng);
    m.d = m.C * witness + VectorXd::Constant(mi, 0.1);

    const QpSolution full = solve_convex_qp(m);
    REQUIRE(full.status == QpStatus::kOptimal);
    CHECK(verify_kkt(m, full, 1e-7).pass);
    CHECK(full.objective <= m.objective(witness) + 1e-7);

    m.nullspace_convex = true;
    const QpSolution red = solve_convex_qp(m);
    REQUIRE(red.status == QpStatus::kOptimal);
    CHECK(verify_kkt(m, red, 1e-7).pass);
    CHECK(std::abs(red.objective - full.objective) <= 1e-6);
  }
}

TEST_CASE("nullspace-convex model that is indefinite in the full space") {
  // x1^2 - x2^2 with x2 = 0 pinned by the equality
  auto m = box_model(MatrixXd::Zero(2, 2), VectorXd::Zero(2), VectorXd::Constant(2, -1),
                     VectorXd::Ones(2));
  m.Q(0, 0) = 1;
  m.Q(1, 1) = -1;
  m.q(0) = -1;
  m.A.resize(1, 2);
  m.A << 0, 1;
  m.b = vec({0});
  m.nullspace_convex = true;
  const QpSolution s = solve_convex_qp(m);
  REQUIRE(s.status == QpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(-0.25).epsilon(1e-9));
  CHECK(verify_kkt(m, s, 1e-8).pass);
}
