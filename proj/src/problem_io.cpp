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

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "smiqp/problem.hpp"

namespace smiqp {
namespace {

using nlohmann::json;

VectorXd read_vector(const json& doc, const char* key, int expected) {
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw ProblemError(fmt::format("schema violation: \"{}\" must be an array", key));
  if (expected >= 0 && static_cast<int>(arr.size()) != expected) {
    throw ProblemError(fmt::format("dimension mismatch: \"{}\" has {} entries, expected {}", key,
                                   arr.size(), expected));
  }
  VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw ProblemError(fmt::format("schema violation: \"{}\"[{}] is not a number", key, i));
    }
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

MatrixXd read_rows(const json& doc, const char* key, int n) {
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw ProblemError(fmt::format("schema violation: \"{}\" must be an array", key));
  MatrixXd M(static_cast<Eigen::Index>(arr.size()), n);
  for (std::size_t r = 0; r < arr.size(); ++r) {
    const json& row = arr[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ProblemError(fmt::format("dimension mismatch: \"{}\" row {} must have {} entries", key,
                                     r + 1, n));
    }
    for (int c = 0; c < n; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) {
        throw ProblemError(fmt::format("schema violation: \"{}\" row {} has a non-number", key, r + 1));
      }
      M(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return M;
}

void require_key(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ProblemError(fmt::format("schema violation: missing \"{}\"", key));
}

json vector_to_json(const VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json rows_to_json(const MatrixXd& M) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    arr.push_back(std::move(row));
  }
  return arr;
}

// Line-oriented tokenizer for QPLIB: everything after '#' is a comment and
// blank lines are skipped.
class QplibReader {
 public:
  explicit QplibReader(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      std::vector<std::string> tokens;
      std::istringstream in{std::string(line)};
      for (std::string tok; in >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) lines_.push_back(std::move(tokens));
      pos = end + 1;
    }
  }

  const std::vector<std::string>& next_line(const char* what) {
    if (cursor_ >= lines_.size()) {
      throw ProblemError(fmt::format("QPLIB: unexpected end of file while reading {}", what));
    }
    return lines_[cursor_++];
  }

  std::string next_word(const char* what) { return next_line(what).front(); }

  long next_int(const char* what) { return to_int(next_line(what).front(), what); }

  double next_double(const char* what) { return to_double(next_line(what).front(), what); }

  static long to_int(const std::string& tok, const char* what) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ProblemError(fmt::format("QPLIB: expected integer for {}, got '{}'", what, tok));
    }
    return value;
  }

  static double to_double(const std::string& tok, const char* what) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ProblemError(fmt::format("QPLIB: expected number for {}, got '{}'", what, tok));
    }
  }

 private:
  std::vector<std::vector<std::string>> lines_;
  std::size_t cursor_ = 0;
};

int checked_index(long idx, long limit, const char* what) {
  if (idx < 1 || idx > limit) {
    throw ProblemError(fmt::format("QPLIB: {} index {} out of range 1..{}", what, idx, limit));
  }
  return static_cast<int>(idx - 1);
}

// Reads "default value / count / (index value)*" into `out`.
void read_defaulted_vector(QplibReader& rd, VectorXd& out, const char* what) {
  out.setConstant(rd.next_double(what));
  const long count = rd.next_int(what);
  for (long k = 0; k < count; ++k) {
    const auto& line = rd.next_line(what);
    if (line.size() < 2) throw ProblemError(fmt::format("QPLIB: malformed {} entry", what));
    const int i = checked_index(QplibReader::to_int(line[0], what), out.size(), what);
    out(i) = QplibReader::to_double(line[1], what);
  }
}

}  // namespace

Problem parse_json(std::string_view text, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProblemError(fmt::format("malformed JSON document: {}", e.what()));
  }
  if (!doc.is_object()) throw ProblemError("schema violation: top level must be an object");
  for (const char* key : {"n", "Q", "q", "l", "u"}) require_key(doc, key);
  if (!doc["n"].is_number_integer() || doc["n"].get<long>() < 1) {
    throw ProblemError("schema violation: \"n\" must be a positive integer");
  }
  const int n = doc["n"].get<int>();

  ProblemData raw;
  raw.q = read_vector(doc, "q", n);
  raw.lower = read_vector(doc, "l", n);
  raw.upper = read_vector(doc, "u", n);
  raw.Q = MatrixXd::Zero(n, n);

  const json& entries = doc["Q"];
  if (!entries.is_array()) throw ProblemError("schema violation: \"Q\" must be an array");
  std::set<std::pair<long, long>> seen;
  for (const json& e : entries) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
        !e[1].is_number_integer() || !e[2].is_number()) {
      throw ProblemError("schema violation: quadratic entries must be [i, j, v]");
    }
    const long i = e[0].get<long>();
    const long j = e[1].get<long>();
    if (i < 1 || j < 1 || i > n || j > n) {
      throw ProblemError(fmt::format("schema violation: quadratic index ({}, {}) out of range", i, j));
    }
    if (i > j) {
      throw ProblemError(fmt::format("schema violation: quadratic entry ({}, {}) must have i <= j", i, j));
    }
    if (!seen.emplace(i, j).second) {
      throw ProblemError(fmt::format("duplicate quadratic coefficient ({}, {})", i, j));
    }
    const double v = e[2].get<double>();
    raw.Q(i - 1, j - 1) = v;
    raw.Q(j - 1, i - 1) = v;
  }

  auto optional_block = [&](const char* mkey, const char* vkey, MatrixXd& M, VectorXd& v) {
    const bool hm = doc.contains(mkey);
    const bool hv = doc.contains(vkey);
    if (hm != hv) {
      throw ProblemError(fmt::format("schema violation: \"{}\" and \"{}\" must appear together", mkey, vkey));
    }
    if (!hm) return;
    M = read_rows(doc, mkey, n);
    v = read_vector(doc, vkey, static_cast<int>(M.rows()));
  };
  optional_block("A", "b", raw.A, raw.b);
  optional_block("C", "d", raw.C, raw.d);

  if (doc.contains("integers")) {
    const json& ints = doc["integers"];
    if (!ints.is_array()) throw ProblemError("schema violation: \"integers\" must be an array");
    for (const json& k : ints) {
      if (!k.is_number_integer()) throw ProblemError("schema violation: integer indices must be integers");
      raw.integers.push_back(k.get<int>() - 1);
    }
  }
  if (doc.contains("offset")) {
    if (!doc["offset"].is_number()) throw ProblemError("schema violation: \"offset\" must be a number");
    raw.offset = doc["offset"].get<double>();
  }
  return Problem::validate(std::move(raw), warnings);
}

std::string emit_json(const Problem& problem) {
  const int n = problem.n();
  json doc;
  doc["n"] = n;
  json entries = json::array();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (problem.Q()(i, j) != 0.0) entries.push_back({i + 1, j + 1, problem.Q()(i, j)});
    }
  }
  doc["Q"] = std::move(entries);
  doc["q"] = vector_to_json(problem.q());
  if (problem.num_equalities() > 0) {
    doc["A"] = rows_to_json(problem.A());
    doc["b"] = vector_to_json(problem.b());
  }
  if (problem.num_inequalities() > 0) {
    doc["C"] = rows_to_json(problem.C());
    doc["d"] = vector_to_json(problem.d());
  }
  doc["l"] = vector_to_json(problem.lower());
  doc["u"] = vector_to_json(problem.upper());
  if (problem.has_integers()) {
    json ints = json::array();
    for (int i : problem.integers()) ints.push_back(i + 1);
    doc["integers"] = std::move(ints);
  }
  if (problem.offset() != 0.0) doc["offset"] = problem.offset();
  return doc.dump() + "\n";
}

Problem parse_qplib(std::string_view text, std::vector<std::string>* warnings) {
  QplibReader rd(text);
  rd.next_line("problem name");
  const std::string code = rd.next_word("problem type");
  if (code.size() != 3) throw ProblemError(fmt::format("QPLIB: bad problem type '{}'", code));
  const char obj_kind = code[0];
  const char var_kind = code[1];
  const char con_kind = code[2];
  if (con_kind != 'N' && con_kind != 'B' && con_kind != 'L') {
    throw ProblemError(fmt::format(
        "QPLIB: unsupported problem class '{}' (only linear constraints are supported)", code));
  }
  if (std::string("LDCQ").find(obj_kind) == std::string::npos ||
      std::string("CBMIG").find(var_kind) == std::string::npos) {
    throw ProblemError(fmt::format("QPLIB: unknown problem type '{}'", code));
  }

  std::string sense = rd.next_word("objective sense");
  for (auto& ch : sense) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (sense != "minimize" && sense != "maximize") {
    throw ProblemError(fmt::format("QPLIB: bad objective sense '{}'", sense));
  }
  const long n = rd.next_int("number of variables");
  if (n < 1) throw ProblemError("QPLIB: number of variables must be positive");
  const bool has_rows = con_kind == 'L';
  const long m = has_rows ? rd.next_int("number of constraints") : 0;

  ProblemData raw;
  raw.Q = MatrixXd::Zero(n, n);
  raw.q = VectorXd::Zero(n);

  if (obj_kind != 'L') {
    const long nnz = rd.next_int("number of quadratic objective terms");
    std::set<std::pair<int, int>> seen;
    for (long k = 0; k < nnz; ++k) {
      const auto& line = rd.next_line("quadratic objective term");
      if (line.size() < 3) throw ProblemError("QPLIB: malformed quadratic objective term");
      int i = checked_index(QplibReader::to_int(line[0], "objective row"), n, "objective");
      int j = checked_index(QplibReader::to_int(line[1], "objective column"), n, "objective");
      if (i < j) std::swap(i, j);
      if (!seen.emplace(i, j).second) {
        throw ProblemError(fmt::format("duplicate quadratic coefficient ({}, {})", i + 1, j + 1));
      }
      const double half = 0.5 * QplibReader::to_double(line[2], "objective coefficient");
      raw.Q(i, j) = half;
      raw.Q(j, i) = half;
    }
  }
  read_defaulted_vector(rd, raw.q, "linear objective");
  raw.offset = rd.next_double("objective constant");

  MatrixXd rows = MatrixXd::Zero(m, n);
  if (has_rows) {
    const long nnz = rd.next_int("number of constraint terms");
    for (long k = 0; k < nnz; ++k) {
      const auto& line = rd.next_line("constraint term");
      if (line.size() < 3) throw ProblemError("QPLIB: malformed constraint term");
      const int r = checked_index(QplibReader::to_int(line[0], "constraint row"), m, "constraint");
      const int c = checked_index(QplibReader::to_int(line[1], "constraint column"), n, "variable");
      rows(r, c) += QplibReader::to_double(line[2], "constraint coefficient");
    }
  }
  const double infinity = std::abs(rd.next_double("infinity value"));
  auto is_inf = [infinity](double v) { return std::abs(v) >= infinity || !std::isfinite(v); };

  if (has_rows) {
    VectorXd cl(m), cu(m);
    read_defaulted_vector(rd, cl, "constraint lower bound");
    read_defaulted_vector(rd, cu, "constraint upper bound");
    std::vector<VectorXd> eq_rows, ineq_rows;
    std::vector<double> eq_rhs, ineq_rhs;
    for (long r = 0; r < m; ++r) {
      const VectorXd row = rows.row(r).transpose();
      const bool lo_inf = is_inf(cl(r));
      const bool hi_inf = is_inf(cu(r));
      if (!lo_inf && !hi_inf && cl(r) == cu(r)) {
        eq_rows.push_back(row);
        eq_rhs.push_back(cl(r));
        continue;
      }
      if (!lo_inf) {
        ineq_rows.push_back(-row);
        ineq_rhs.push_back(-cl(r));
      }
      if (!hi_inf) {
        ineq_rows.push_back(row);
        ineq_rhs.push_back(cu(r));
      }
    }
    auto pack = [n](const std::vector<VectorXd>& rs, const std::vector<double>& rhs, MatrixXd& M,
                    VectorXd& v) {
      M.resize(static_cast<Eigen::Index>(rs.size()), n);
      v.resize(static_cast<Eigen::Index>(rs.size()));
      for (std::size_t k = 0; k < rs.size(); ++k) {
        M.row(static_cast<Eigen::Index>(k)) = rs[k].transpose();
        v(static_cast<Eigen::Index>(k)) = rhs[k];
      }
    };
    pack(eq_rows, eq_rhs, raw.A, raw.b);
    pack(ineq_rows, ineq_rhs, raw.C, raw.d);
  }

  raw.lower = VectorXd::Zero(n);
  raw.upper = VectorXd::Ones(n);
  if (var_kind != 'B') {
    read_defaulted_vector(rd, raw.lower, "variable lower bound");
    read_defaulted_vector(rd, raw.upper, "variable upper bound");
    for (long i = 0; i < n; ++i) {
      if (is_inf(raw.lower(i)) || is_inf(raw.upper(i))) {
        throw ProblemError(fmt::format("QPLIB: infinite variable bound at index {}", i + 1));
      }
    }
  }

  std::vector<int> types(static_cast<std::size_t>(n), 0);
  if (var_kind == 'B' || var_kind == 'I') {
    std::fill(types.begin(), types.end(), var_kind == 'B' ? 2 : 1);
  } else if (var_kind == 'M' || var_kind == 'G') {
    VectorXd t(n);
    read_defaulted_vector(rd, t, "variable type");
    for (long i = 0; i < n; ++i) types[static_cast<std::size_t>(i)] = static_cast<int>(t(i));
  }
  for (long i = 0; i < n; ++i) {
    const int t = types[static_cast<std::size_t>(i)];
    if (t == 0) continue;
    if (t != 1 && t != 2) {
      throw ProblemError(fmt::format("QPLIB: unsupported variable type {} at index {}", t, i + 1));
    }
    raw.integers.push_back(static_cast<int>(i));
    if (t == 2) {
      raw.lower(i) = std::max(raw.lower(i), 0.0);
      raw.upper(i) = std::min(raw.upper(i), 1.0);
    }
  }

  if (sense == "maximize") {
    raw.Q = -raw.Q;
    raw.q = -raw.q;
    raw.offset = -raw.offset;
    if (warnings != nullptr) warnings->push_back("QPLIB: maximization converted to minimization");
  }
  return Problem::validate(std::move(raw), warnings);
}

}  // namespace smiqp
