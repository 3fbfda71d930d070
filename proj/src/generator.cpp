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

#include <random>

#include <fmt/format.h>

#include "smiqp/problem.hpp"

namespace smiqp {
namespace {

// The standard distributions are implementation-defined; mapping raw engine
// output by hand keeps generated instances identical across toolchains.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  bool bernoulli(double p) { return unit() < p; }
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

MatrixXd random_symmetric(Sampler& rng, int n, double density, double lo, double hi) {
  MatrixXd Q = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Q(i, i) = rng.uniform(lo, hi);
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(density)) {
        const double v = rng.uniform(lo, hi);
        Q(i, j) = v;
        Q(j, i) = v;
      }
    }
  }
  return Q;
}

VectorXd random_vector(Sampler& rng, int n, double lo, double hi) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::kCbqp: return "cbqp";
    case Family::kBoxQp: return "boxqp";
    case Family::kEiqp: return "eiqp";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "cbqp") return Family::kCbqp;
  if (name == "boxqp") return Family::kBoxQp;
  if (name == "eiqp") return Family::kEiqp;
  throw ProblemError(fmt::format("unknown instance family '{}'", name));
}

Problem generate_random(const GeneratorSpec& spec) {
  if (spec.n < 1) throw ProblemError("generator: n must be positive");
  if (!(spec.density > 0.0 && spec.density <= 1.0)) {
    throw ProblemError(fmt::format("generator: density {} outside (0, 1]", spec.density));
  }
  if (!(spec.coef_lo < spec.coef_hi)) throw ProblemError("generator: empty coefficient range");

  const int n = spec.n;
  Sampler rng(spec.seed);
  ProblemData raw;
  raw.Q = random_symmetric(rng, n, spec.density, spec.coef_lo, spec.coef_hi);
  raw.q = random_vector(rng, n, spec.coef_lo, spec.coef_hi);

  switch (spec.family) {
    case Family::kCbqp: {
      if (spec.cardinality < 0 || spec.cardinality > n) {
        throw ProblemError(fmt::format("generator: cardinality {} infeasible for n = {}",
                                       spec.cardinality, n));
      }
      raw.A = MatrixXd::Ones(1, n);
      raw.b = VectorXd::Constant(1, spec.cardinality);
      raw.lower = VectorXd::Zero(n);
      raw.upper = VectorXd::Ones(n);
      for (int i = 0; i < n; ++i) raw.integers.push_back(i);
      break;
    }
    case Family::kBoxQp: {
      raw.lower = VectorXd::Zero(n);
      raw.upper = VectorXd::Ones(n);
      break;
    }
    case Family::kEiqp: {
      if (spec.equalities < 0 || spec.equalities > n) {
        throw ProblemError(fmt::format("generator: {} equalities infeasible for n = {}",
                                       spec.equalities, n));
      }
      if (spec.integer_upper < 1) throw ProblemError("generator: integer_upper must be >= 1");
      VectorXd witness(n);
      for (int i = 0; i < n; ++i) witness(i) = rng.integer(0, spec.integer_upper);
      raw.A = MatrixXd::Zero(spec.equalities, n);
      for (int r = 0; r < spec.equalities; ++r) {
        for (int c = 0; c < n; ++c) {
          if (rng.bernoulli(spec.density)) {
            const int v = rng.integer(1, 5);
            raw.A(r, c) = rng.bernoulli(0.5) ? v : -v;
          }
        }
        if (raw.A.row(r).isZero()) raw.A(r, rng.integer(0, n - 1)) = 1.0;
      }
      raw.b = raw.A * witness;
      raw.lower = VectorXd::Zero(n);
      raw.upper = VectorXd::Constant(n, spec.integer_upper);
      for (int i = 0; i < n; ++i) raw.integers.push_back(i);
      break;
    }
  }
  return Problem::validate(std::move(raw));
}

}  // namespace smiqp
