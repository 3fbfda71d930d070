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

#include "smiqp/bnb.hpp"
#include "smiqp/oracle.hpp"

using namespace smiqp;

namespace {

Problem binary(MatrixXd Q, MatrixXd A = {}, VectorXd b = {}, MatrixXd C = {}, VectorXd d = {}) {
  ProblemData raw;
  const auto n = Q.rows();
  raw.q = VectorXd::Zero(n);
  raw.Q = std::move(Q);
  raw.lower = VectorXd::Zero(n);
  raw.upper = VectorXd::Ones(n);
  raw.A = std::move(A);
  raw.b = std::move(b);
  raw.C = std::move(C);
  raw.d = std::move(d);
  for (int i = 0; i < n; ++i) raw.integers.push_back(i);
  return Problem::validate(std::move(raw));
}

Problem box(MatrixXd Q, VectorXd q, VectorXd lo, VectorXd hi, MatrixXd A = {}, VectorXd b = {}) {
  ProblemData raw;
  raw.Q = std::move(Q);
  raw.q = std::move(q);
  raw.lower = std::move(lo);
  raw.upper = std::move(hi);
  raw.A = std::move(A);
  raw.b = std::move(b);
  return Problem::validate(std::move(raw));
}

MatrixXd mat2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

Problem worked_instance() {
  MatrixXd a(1, 2);
  a << 0, 1;
  return box(mat2(1, 0, 0, -1), VectorXd::Zero(2), VectorXd::Constant(2, -1), VectorXd::Ones(2), a,
             VectorXd::Zero(1));
}

// Reference for general-integer instances: every lattice point of the box.
double enumerate_integer_grid(const Problem& p) {
  const int n = p.n();
  VectorXd x = p.lower();
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    if (check_feasibility(p, x, 1e-9, 1e-9).feasible) best = std::min(best, evaluate_objective(p, x));
    int i = 0;
    while (i < n && x(i) >= p.upper()(i)) x(i) = p.lower()(i), ++i;
    if (i == n) break;
    x(i) += 1.0;
  }
  return best;
}

}  // namespace

TEST_CASE("dynamic selection update") {
  SelectionState s;
  s = dynamic_selection_update(s, 0.0, 0.5);
  CHECK(s.omega_lp == 10.0);
  CHECK(s.omega_qp == 1.0);
  s = dynamic_selection_update(s, 0.0, 0.5);
  CHECK(s.omega_lp == 100.0);
  CHECK(s.omega_qp == 1.0);
  s = dynamic_selection_update(SelectionState{}, 1.0, 1.0);
  CHECK(s.omega_lp == 1.0);
  CHECK(s.omega_qp == 2.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> diff(-0.01, 0.01);
  SelectionParams params;
  s = SelectionState{};
  for (int k = 0; k < 2000; ++k) {
    s = dynamic_selection_update(s, 0.0, diff(rng) + (k % 100 < 50 ? 0.005 : -0.005), params);
    CHECK(s.omega_lp >= 1.0);
    CHECK(s.omega_lp <= params.omega_lp_max);
    CHECK(s.omega_qp >= 1.0);
    CHECK(s.omega_qp <= params.omega_qp_max);
  }
}

TEST_CASE("relative gap") {
  CHECK(relative_gap(-10, -12) == doctest::Approx(100.0 * 2 / 12));
  CHECK(relative_gap(3, 3) == 0.0);
  CHECK(relative_gap(1, 0) == doctest::Approx(1e5));
  CHECK(std::isinf(relative_gap(std::numeric_limits<double>::infinity(), 0)));
}

TEST_CASE("solve: small examples") {
  SolveResult r = solve(binary(mat2(2, -3, -3, 2)));
  CHECK(r.status == SolveStatus::kOptimal);
  CHECK(r.f_ubd == doctest::Approx(-2));
  CHECK(r.x == Eigen::Vector2d(1, 1));

  r = solve(binary(mat2(0, 1, 1, 0), MatrixXd::Ones(1, 2), VectorXd::Ones(1)));
  CHECK(r.status == SolveStatus::kOptimal);
  CHECK(r.f_ubd == doctest::Approx(0).epsilon(1e-12));

  r = solve(box(MatrixXd::Constant(1, 1, -1), VectorXd::Zero(1), VectorXd::Constant(1, -1),
                VectorXd::Constant(1, 2)));
  CHECK(r.status == SolveStatus::kOptimal);
  CHECK(r.f_ubd == doctest::Approx(-4));
  CHECK(r.x(0) == doctest::Approx(2));
  CHECK(r.gap <= 1e-4);

  r = solve(binary(mat2(0, 1, 1, 0), MatrixXd::Ones(1, 2), VectorXd::Constant(1, 3)));
  CHECK(r.status == SolveStatus::kInfeasible);
  CHECK(r.x.size() == 0);
}

TEST_CASE("root bounds on the worked instance") {
  const Problem p = worked_instance();
  CHECK(root_relaxation_bound(p, RelaxMode::kEig)->value == doctest::Approx(-2).epsilon(1e-7));
  CHECK(root_relaxation_bound(p, RelaxMode::kGeig)->value == doctest::Approx(-1).epsilon(1e-7));
  const auto z = root_relaxation_bound(p, RelaxMode::kEigzApprox);
  REQUIRE(z);
  CHECK(z->delta == 1e4);
  CHECK(z->value == doctest::Approx(-2.0 / 10001).epsilon(1e-6));

  SolverConfig config;
  config.relax = RelaxMode::kEigzApprox;
  const SolveResult r = solve(p, config);
  CHECK(r.delta == 1e4);
  CHECK(r.root_bound == doctest::Approx(-2.0 / 10001).epsilon(1e-6));
  CHECK(r.f_ubd == doctest::Approx(0).epsilon(1e-9));
  config.relax = RelaxMode::kEig;
  CHECK(solve(p, config).root_bound == doctest::Approx(-2).epsilon(1e-7));
}

TEST_CASE("lower bound on a convex node uses the plain relaxation") {
  const Problem p = box(MatrixXd::Identity(2, 2), Eigen::Vector2d(-1, 1), VectorXd::Constant(2, -1),
                        VectorXd::Ones(2));
  const RestrictedProblem r = restrict(p, make_restriction(p.lower(), p.upper()));
  SelectionState s;
  SolveStats stats;
  const NodeBound nb = lower_bound(r, SolverConfig{}, 1.0, -1e9, s, stats);
  CHECK(nb.kind == "PLAIN");
  CHECK(nb.convex);
  CHECK(nb.alpha == 0.0);
  CHECK(nb.value == doctest::Approx(-0.5));
}

TEST_CASE("upper bound heuristic") {
  MatrixXd q = MatrixXd::Zero(3, 3);
  const Problem card = binary(q, MatrixXd::Ones(1, 3), VectorXd::Constant(1, 2));
  const NodeRestriction root = make_restriction(card.lower(), card.upper());
  auto cand = upper_bound_heuristic(card, root, Eigen::Vector3d(0.9, 0.2, 0.8), 1.0);
  REQUIRE(cand);
  CHECK(cand->x == Eigen::Vector3d(1, 0, 1));
  // Not improving.
  CHECK_FALSE(upper_bound_heuristic(card, root, Eigen::Vector3d(0.9, 0.2, 0.8), 0.0));

  const Problem concave = box(MatrixXd::Constant(1, 1, -1), VectorXd::Zero(1),
                              VectorXd::Constant(1, -1), VectorXd::Constant(1, 2));
  cand = upper_bound_heuristic(concave, make_restriction(concave.lower(), concave.upper()),
                               VectorXd::Constant(1, 0.7), 0.0);
  REQUIRE(cand);
  CHECK(cand->x(0) == 2.0);

  MatrixXd c(1, 2);
  c << 1, 1;
  const Problem packing = binary(MatrixXd::Zero(2, 2), {}, {}, c, VectorXd::Ones(1));
  CHECK_FALSE(upper_bound_heuristic(packing, make_restriction(packing.lower(), packing.upper()),
                                    Eigen::Vector2d(0.9, 0.9), 1.0));
}

TEST_CASE("solve agrees with enumeration across modes and rules") {
  const RelaxMode modes[] = {RelaxMode::kEig, RelaxMode::kGeig, RelaxMode::kEigzApprox,
                             RelaxMode::kMcCormick, RelaxMode::kSeparable, RelaxMode::kAuto};
  const BranchRule rules[] = {BranchRule::kApprox, BranchRule::kGct, BranchRule::kExact,
                              BranchRule::kFractional};
  for (int seed = 0; seed < 6; ++seed) {
    GeneratorSpec g;
    g.n = 7;
    g.cardinality = 3;
    g.density = 0.6;
    g.seed = 500 + static_cast<std::uint64_t>(seed);
    const Problem p = generate_random(g);
    const double ref = enumerate_binary(p).value;
    for (RelaxMode mode : modes) {
      SolverConfig config;
      config.relax = mode;
      config.branch = rules[seed % 4];
      const SolveResult r = solve(p, config);
      INFO("seed ", seed, " mode ", to_string(mode));
      CHECK(r.status == SolveStatus::kOptimal);
      CHECK(r.f_ubd == doctest::Approx(ref).epsilon(1e-9));
      CHECK(r.f_lbd <= ref + 1e-9);
      CHECK(r.stats.parent_bounds == 0);
    }
  }
}

TEST_CASE("solve on box QPs matches KKT enumeration") {
  for (int seed = 0; seed < 8; ++seed) {
    GeneratorSpec g;
    g.family = Family::kBoxQp;
    g.n = 2 + seed % 4;
    g.seed = 900 + static_cast<std::uint64_t>(seed);
    const Problem p = generate_random(g);
    const double ref = enumerate_box_kkt(p).value;
    for (RelaxMode mode : {RelaxMode::kEig, RelaxMode::kAuto}) {
      SolverConfig config;
      config.relax = mode;
      const SolveResult r = solve(p, config);
      INFO("seed ", seed, " mode ", to_string(mode));
      CHECK(r.status == SolveStatus::kOptimal);
      CHECK(std::abs(r.f_ubd - ref) <= 1e-6);
      CHECK(r.f_lbd <= ref + 1e-9);
    }
  }
}

TEST_CASE("general integers with equality rows") {
  for (int seed = 0; seed < 6; ++seed) {
    GeneratorSpec g;
    g.family = Family::kEiqp;
    g.n = 4;
    g.equalities = 1;
    g.integer_upper = 3;
    g.seed = 40 + static_cast<std::uint64_t>(seed);
    const Problem p = generate_random(g);
    const double ref = enumerate_integer_grid(p);
    for (RelaxMode mode : {RelaxMode::kEigzApprox, RelaxMode::kAuto}) {
      SolverConfig config;
      config.relax = mode;
      const SolveResult r = solve(p, config);
      INFO("seed ", seed, " mode ", to_string(mode));
      CHECK(r.status == SolveStatus::kOptimal);
      CHECK(r.f_ubd == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("limits, trace and determinism") {
  GeneratorSpec g;
  g.n = 10;
  g.cardinality = 5;
  g.seed = 77;
  const Problem p = generate_random(g);
  SolverConfig config;
  config.record_trace = true;
  config.node_limit = 3;
  const SolveResult limited = solve(p, config);
  CHECK(limited.status == SolveStatus::kNodeLimit);
  CHECK(limited.nodes == 3);
  CHECK(limited.f_lbd <= limited.f_ubd);

  config.node_limit = std::numeric_limits<long>::max();
  const SolveResult a = solve(p, config);
  const SolveResult b = solve(p, config);
  REQUIRE(a.trace.size() == b.trace.size());
  REQUIRE(!a.trace.empty());
  for (std::size_t k = 0; k < a.trace.size(); ++k) CHECK(a.trace[k].to_json() == b.trace[k].to_json());
  CHECK(a.trace[0].id == 0);
  CHECK(a.trace[0].depth == 0);
  CHECK(a.trace[0].to_json().find("\"kind\":") != std::string::npos);

  TraceRecord rec{4, 2, -1.5, "EIG", 0};
  CHECK(rec.to_json() == R"({"id":4,"depth":2,"bound":-1.5,"kind":"EIG","branch":1})");
  rec.branch_variable = -1;
  rec.bound = -std::numeric_limits<double>::infinity();
  CHECK(rec.to_json() == R"({"id":4,"depth":2,"bound":null,"kind":"EIG","branch":null})");
}

TEST_CASE("mode and rule names") {
  CHECK(relax_mode_from_string("eigz") == RelaxMode::kEigzApprox);
  CHECK(relax_mode_from_string("separable") == RelaxMode::kSeparable);
  CHECK(branch_rule_from_string("gct") == BranchRule::kGct);
  CHECK_THROWS(relax_mode_from_string("simplex"));
  CHECK_THROWS(branch_rule_from_string("strong"));
  CHECK(to_string(SolveStatus::kTimeLimit) == "TimeLimit");
}
