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

#include <limits>
#include <random>

#include "smiqp/problem.hpp"

using namespace smiqp;

namespace {

ProblemData box2(MatrixXd Q) {
  ProblemData raw;
  raw.Q = std::move(Q);
  raw.q = VectorXd::Zero(2);
  raw.lower = VectorXd::Zero(2);
  raw.upper = VectorXd::Ones(2);
  return raw;
}

bool throws_with(auto&& fn, std::string_view needle) {
  try {
    fn();
  } catch (const ProblemError& e) {
    return std::string_view(e.what()).find(needle) != std::string_view::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("validate accepts a consistent binary instance") {
  MatrixXd Q(2, 2);
  Q << 0, 1, 1, 0;
  ProblemData raw = box2(Q);
  raw.integers = {1, 0, 1};
  const Problem p = Problem::validate(raw);
  CHECK(p.n() == 2);
  CHECK(p.is_pure_binary());
  CHECK(p.integers() == std::vector<int>{0, 1});
}

TEST_CASE("validate rejects bad bounds and indices") {
  MatrixXd Q = MatrixXd::Zero(2, 2);
  ProblemData raw = box2(Q);
  raw.upper(1) = std::numeric_limits<double>::infinity();
  CHECK(throws_with([&] { Problem::validate(raw); }, "non-finite bound at index 2"));

  raw = box2(Q);
  raw.lower(0) = 1.0;
  CHECK(throws_with([&] { Problem::validate(raw); }, "lower bound"));

  raw = box2(Q);
  raw.integers = {2};
  CHECK(throws_with([&] { Problem::validate(raw); }, "out of range"));

  raw = box2(Q);
  raw.A = MatrixXd::Ones(1, 3);
  raw.b = VectorXd::Ones(1);
  CHECK(throws_with([&] { Problem::validate(raw); }, "dimension mismatch"));
}

TEST_CASE("validate symmetrizes Q and warns") {
  MatrixXd Q(2, 2);
  Q << 0, 1, 0, 0;
  std::vector<std::string> warnings;
  const Problem p = Problem::validate(box2(Q), &warnings);
  CHECK(p.Q()(0, 1) == 0.5);
  CHECK(p.Q()(1, 0) == 0.5);
  CHECK(warnings.size() == 1);
}

TEST_CASE("objective uses the full quadratic form") {
  MatrixXd Q(2, 2);
  Q << 0, 1, 1, 0;
  CHECK(evaluate_objective(Problem::validate(box2(Q)), VectorXd::Ones(2)) == 2.0);
  Q << 2, -3, -3, 2;
  const Problem p = Problem::validate(box2(Q));
  CHECK(evaluate_objective(p, VectorXd::Ones(2)) == -2.0);
  CHECK(evaluate_objective(p, VectorXd::Zero(2)) == 0.0);
  CHECK_THROWS_AS(evaluate_objective(p, VectorXd::Zero(3)), ProblemError);
}

TEST_CASE("objective of an asymmetric input equals that of its symmetrization") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  MatrixXd Q(3, 3);
  for (int i = 0; i < 9; ++i) Q.data()[i] = u(rng);
  ProblemData raw;
  raw.Q = Q;
  raw.q = VectorXd::Zero(3);
  raw.lower = VectorXd::Constant(3, -1);
  raw.upper = VectorXd::Constant(3, 1);
  const Problem p = Problem::validate(raw);
  for (int t = 0; t < 50; ++t) {
    VectorXd x(3);
    for (int i = 0; i < 3; ++i) x(i) = u(rng);
    CHECK(evaluate_objective(p, x) == doctest::Approx(x.dot(Q * x)).epsilon(1e-12));
  }
}

TEST_CASE("feasibility report") {
  ProblemData raw = box2(MatrixXd::Zero(2, 2));
  const Problem plain = Problem::validate(raw);
  auto r = check_feasibility(plain, VectorXd::Ones(2), 1e-9, 1e-6);
  CHECK(r.feasible);
  CHECK(r.bound_violation == 0.0);

  raw.A = MatrixXd::Ones(1, 2);
  raw.b = VectorXd::Ones(1);
  const Problem eq = Problem::validate(raw);
  VectorXd half = VectorXd::Constant(2, 0.5);
  r = check_feasibility(eq, half, 1e-9, 1e-6);
  CHECK(r.equality_residual == 0.0);
  CHECK(r.feasible);

  raw.integers = {0};
  const Problem ip = Problem::validate(raw);
  VectorXd x(2);
  x << 0.4, 0.6;
  r = check_feasibility(ip, x, 1e-9, 1e-6);
  CHECK(r.integrality_deviation == doctest::Approx(0.4));
  CHECK_FALSE(r.feasible);
}

TEST_CASE("json parsing") {
  const Problem p = parse_json(R"({"n":1,"Q":[[1,1,-2.0]],"q":[0],"l":[-1],"u":[1]})");
  CHECK(p.Q()(0, 0) == -2.0);
  CHECK(throws_with([] { parse_json(R"({"n":1,"Q":[],"q":[0],"l":[-1]})"); },
                    "missing \"u\""));
  CHECK(throws_with(
      [] { parse_json(R"({"n":2,"Q":[[1,2,1],[1,2,3]],"q":[0,0],"l":[0,0],"u":[1,1]})"); },
      "duplicate quadratic coefficient"));
  CHECK(throws_with([] { parse_json("{not json"); }, "malformed"));
  const Problem off = parse_json(
      R"({"n":2,"Q":[[1,2,1.5]],"q":[1,0],"l":[0,0],"u":[1,1],"A":[[1,1]],"b":[1],"integers":[2]})");
  CHECK(off.Q()(1, 0) == 1.5);
  CHECK(off.num_equalities() == 1);
  CHECK(off.integers() == std::vector<int>{1});
}

TEST_CASE("json round trip is the identity on generated instances") {
  for (Family f : {Family::kCbqp, Family::kBoxQp, Family::kEiqp}) {
    GeneratorSpec spec;
    spec.family = f;
    spec.n = 7;
    spec.seed = 11;
    const Problem p = generate_random(spec);
    const std::string text = emit_json(p);
    const Problem back = parse_json(text);
    CHECK(back.Q() == p.Q());
    CHECK(back.q() == p.q());
    CHECK(back.A() == p.A());
    CHECK(back.b() == p.b());
    CHECK(back.lower() == p.lower());
    CHECK(back.upper() == p.upper());
    CHECK(back.integers() == p.integers());
    CHECK(emit_json(back) == text);
  }
}

TEST_CASE("qplib reader converts conventions and splits rows") {
  const char* text = R"(demo
QML # quadratic objective, mixed variables, linear constraints
minimize
2      # variables
2      # constraints
2      # quadratic terms
1 1 4
2 1 -2
0      # default linear coefficient
1
2 3.0
0.5    # constant
4      # constraint terms
1 1 1
1 2 1
2 1 1
2 2 -1
1e30   # infinity
0      # default cl
1
1 1
1e30   # default cu
2
1 1
2 5
0      # default lower
0
1      # default upper
1
2 3
0      # default type
1
2 1
)";
  const Problem p = parse_qplib(text);
  CHECK(p.Q()(0, 0) == 2.0);
  CHECK(p.Q()(0, 1) == -1.0);
  CHECK(p.Q()(1, 0) == -1.0);
  CHECK(p.q()(1) == 3.0);
  CHECK(p.offset() == 0.5);
  REQUIRE(p.num_equalities() == 1);
  CHECK(p.A()(0, 0) == 1.0);
  CHECK(p.b()(0) == 1.0);
  REQUIRE(p.num_inequalities() == 2);
  CHECK(p.C()(0, 0) == -1.0);
  CHECK(p.d()(0) == 0.0);
  CHECK(p.C()(1, 1) == -1.0);
  CHECK(p.d()(1) == 5.0);
  CHECK(p.upper()(1) == 3.0);
  CHECK(p.integers() == std::vector<int>{1});
}

TEST_CASE("qplib reader rejects quadratic constraints and free variables") {
  CHECK(throws_with([] { parse_qplib("x\nQCQ\nminimize\n1\n1\n"); }, "unsupported problem class"));
  const char* free_var = "x\nQCN\nminimize\n1\n1\n1 1 2\n0\n0\n0\n1e30\n-1e30\n0\n1\n0\n";
  CHECK(throws_with([&] { parse_qplib(free_var); }, "infinite variable bound at index 1"));
}

TEST_CASE("generator families and determinism") {
  GeneratorSpec spec;
  spec.family = Family::kCbqp;
  spec.n = 10;
  spec.density = 0.5;
  spec.cardinality = 3;
  spec.seed = 7;
  CHECK(emit_json(generate_random(spec)) == emit_json(generate_random(spec)));
  const Problem cb = generate_random(spec);
  CHECK(cb.is_pure_binary());
  CHECK(cb.A() == MatrixXd::Ones(1, 10));
  CHECK(cb.b()(0) == 3.0);

  spec.family = Family::kBoxQp;
  spec.n = 20;
  spec.density = 1.0;
  const Problem box = generate_random(spec);
  CHECK(box.num_equalities() == 0);
  CHECK(box.num_inequalities() == 0);
  CHECK(box.lower() == VectorXd::Zero(20));
  CHECK(box.upper() == VectorXd::Ones(20));
  CHECK_FALSE(box.has_integers());
  CHECK((box.Q().array().abs() <= 10.0).all());

  spec.family = Family::kEiqp;
  spec.n = 8;
  const Problem ei = generate_random(spec);
  CHECK(ei.num_equalities() == 2);
  CHECK((ei.A().array() == ei.A().array().round()).all());

  spec.family = Family::kCbqp;
  spec.n = 5;
  spec.cardinality = 6;
  CHECK_THROWS_AS(generate_random(spec), ProblemError);
}
