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

#include "smiqp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "smiqp/branching.hpp"
#include "smiqp/oracle.hpp"

namespace smiqp {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void configure_logging() {
  auto logger = spdlog::get("smiqp");
  if (!logger) logger = spdlog::stderr_color_mt("smiqp");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("SPECTRAL_MIQP_LOG");
  const std::string level = env != nullptr ? env : "error";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::set_level(spdlog::level::err);
  }
}

struct RootRow {
  std::vector<std::string> rows;
  std::string meta;
};

struct UpperBound {
  double value = std::numeric_limits<double>::infinity();
  std::string source;
};

UpperBound upper_bound_for(const Problem& p, double time_limit) {
  if (p.is_pure_binary() && p.n() <= 20) return {enumerate_binary(p).value, "oracle_binary"};
  if (!p.has_integers() && p.num_equalities() == 0 && p.num_inequalities() == 0 && p.n() <= 8) {
    return {enumerate_box_kkt(p).value, "oracle_box_kkt"};
  }
  SolverConfig config;
  config.time_limit = time_limit;
  const SolveResult r = solve(p, config);
  return {r.f_ubd, fmt::format("solve_{}s_{}", time_limit, to_string(r.status))};
}

RootRow root_gap_rows(const fs::path& path, const RootGapOptions& options) {
  RootRow out;
  const std::string name = path.stem().string();
  const Problem p = load_instance(path);
  const UpperBound ub = upper_bound_for(p, options.ub_time_limit);
  out.meta = fmt::format("# instance={} f_ubd={} source={}", name,
                         std::isfinite(ub.value) ? fmt::format("{:.10g}", ub.value) : "", ub.source);
  const std::pair<RelaxMode, const char*> kinds[] = {{RelaxMode::kEig, "EIG"},
                                                     {RelaxMode::kGeig, "GEIG"},
                                                     {RelaxMode::kEigzApprox, "EIGZ"},
                                                     {RelaxMode::kMcCormick, "MCCORMICK"},
                                                     {RelaxMode::kSeparable, "SEPARABLE"}};
  for (const auto& [mode, label] : kinds) {
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<RootBound> bound;
    try {
      bound = root_relaxation_bound(p, mode);
    } catch (const std::exception& e) {
      spdlog::warn("{} {}: {}", name, label, e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::string b, g;
    if (bound && std::isfinite(bound->value)) {
      b = fmt::format("{:.10g}", bound->value);
      if (std::isfinite(ub.value)) g = fmt::format("{:.6g}", relative_gap(ub.value, bound->value));
    } else if (bound) {
      b = "inf";
    }
    out.rows.push_back(fmt::format("{},{},{},{},{}", name, label, b, g,
                                   options.omit_time ? std::string("0") : fmt::format("{:.3f}", ms)));
  }
  return out;
}

std::string format_density(double d) { return fmt::format("{}", d); }

}  // namespace

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return 0;
    case SolveStatus::kTimeLimit:
    case SolveStatus::kNodeLimit: return 2;
    case SolveStatus::kInfeasible: return 3;
  }
  return 1;
}

Problem load_instance(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw std::runtime_error(fmt::format("no such file '{}'", path.string()));
  const std::string text = read_file(path);
  std::vector<std::string> warnings;
  Problem p = path.extension() == ".qplib" ? parse_qplib(text, &warnings) : parse_json(text, &warnings);
  for (const auto& w : warnings) spdlog::warn("{}: {}", path.string(), w);
  return p;
}

std::string solve_report_json(const SolveResult& r, const SolverConfig& config) {
  json j;
  j["status"] = to_string(r.status);
  j["objective"] = number(r.f_ubd);
  j["bound"] = number(r.f_lbd);
  j["gap_percent"] = number(r.gap);
  j["nodes"] = r.nodes;
  j["wall_ms"] = r.wall_ms;
  j["root_bound"] = number(r.root_bound);
  j["delta"] = r.delta;
  j["relaxation"] = to_string(config.relax);
  j["branch"] = to_string(config.branch);
  j["x"] = json::array();
  for (Eigen::Index i = 0; i < r.x.size(); ++i) j["x"].push_back(r.x(i));
  j["stats"] = {{"relaxations", r.stats.relaxations},     {"qp_solves", r.stats.qp_solves},
                {"lp_solves", r.stats.lp_solves},         {"kkt_rejected", r.stats.kkt_rejected},
                {"not_converged", r.stats.not_converged}, {"fallbacks", r.stats.fallbacks},
                {"parent_bounds", r.stats.parent_bounds}, {"worst_kkt", r.stats.worst_kkt}};
  return j.dump();
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

BranchStudyResult cmd_branch_study(const BranchStudyOptions& o, std::ostream& csv) {
  if (o.n < 3) throw std::invalid_argument("branch study needs n >= 3");
  if (o.samples < 1) throw std::invalid_argument("branch study needs at least one sample");
  BranchStudyResult res;
  csv << "sample,rule,gap_percent\n";
  std::vector<int> all(static_cast<std::size_t>(o.n));
  for (int i = 0; i < o.n; ++i) all[static_cast<std::size_t>(i)] = i;
  for (int s = 0; s < o.samples; ++s) {
    GeneratorSpec spec;
    spec.family = Family::kBoxQp;
    spec.n = o.n;
    spec.density = o.density;
    spec.seed = o.seed + static_cast<std::uint64_t>(s);
    const SymMatrix q = SymMatrix::from_lower(generate_random(spec).Q());
    const DeletionProfile profile = deletion_profile(q);
    const int approx = spectral_branch_approx(sym_eig_min(q).vector, all);
    const int gct = spectral_branch_gct(q, all);
    res.approx.push_back(branching_gap_metric(profile, approx));
    res.gct.push_back(branching_gap_metric(profile, gct));
    csv << fmt::format("{},approx,{:.6f}\n{},gct,{:.6f}\n", s + 1, res.approx.back(), s + 1, res.gct.back());
  }
  res.median_approx = median(res.approx);
  res.median_gct = median(res.gct);
  csv << fmt::format("# median_gap_percent approx={:.6f} gct={:.6f}\n", res.median_approx, res.median_gct);
  return res;
}

void cmd_root_gaps(const RootGapOptions& options, std::ostream& csv, std::ostream& meta) {
  if (!fs::is_directory(options.corpus)) {
    throw std::runtime_error(fmt::format("'{}' is not a directory", options.corpus.string()));
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(options.corpus)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".json" || ext == ".qplib")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<RootRow> results(files.size());
  std::vector<std::string> errors(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < files.size(); k = next++) {
      try {
        results[k] = root_gap_rows(files[k], options);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const int jobs = std::clamp(options.jobs, 1, 64);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  csv << "instance,relaxation,bound,gap_percent,time_ms\n";
  for (std::size_t k = 0; k < files.size(); ++k) {
    if (!errors[k].empty()) {
      meta << fmt::format("# instance={} error={}\n", files[k].stem().string(), errors[k]);
      continue;
    }
    meta << results[k].meta << '\n';
    for (const auto& row : results[k].rows) csv << row << '\n';
  }
}

std::vector<fs::path> cmd_generate(const GeneratorSpec& spec, int count, const fs::path& out_dir) {
  if (count < 1) throw std::invalid_argument("count must be positive");
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (int k = 0; k < count; ++k) {
    GeneratorSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(k);
    const Problem p = generate_random(s);
    const fs::path path = out_dir / fmt::format("{}_n{}_d{}_s{}.json", to_string(s.family), s.n,
                                                format_density(s.density), s.seed);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    f << emit_json(p) << '\n';
    written.push_back(path);
  }
  return written;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"Global solver for nonconvex MIQPs with spectral relaxations"};
  app.require_subcommand(1);

  SolverConfig config;
  std::string relax = "auto", branch = "auto", trace_path, instance;
  int jobs = 1;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance and print a JSON report");
  solve_cmd->add_option("instance", instance, "JSON or .qplib instance")->required();
  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--relax", relax, "eig|geig|eigz|mccormick|separable|auto");
    cmd->add_option("--branch", branch, "approx|gct|exact|fractional|auto");
    cmd->add_option("--rel-tol", config.rel_tol);
    cmd->add_option("--abs-tol", config.abs_tol);
    cmd->add_option("--time-limit", config.time_limit, "seconds");
    cmd->add_option("--node-limit", config.node_limit);
    cmd->add_option("--seed", config.seed);
    cmd->add_option("--jobs", jobs, "accepted for uniformity; a single solve is sequential");
  };
  add_solver_flags(solve_cmd);
  solve_cmd->add_option("--trace", trace_path, "write one JSON line per node");

  RootGapOptions gaps;
  std::string corpus;
  auto* gaps_cmd = app.add_subcommand("root-gaps", "Root relaxation gaps over a corpus (CSV)");
  gaps_cmd->add_option("corpus", corpus, "directory of instances")->required();
  gaps_cmd->add_option("--jobs", gaps.jobs, "instances processed in parallel");
  gaps_cmd->add_option("--ub-time-limit", gaps.ub_time_limit, "seconds for the incumbent run");
  gaps_cmd->add_flag("--omit-time", gaps.omit_time, "write time_ms as 0");

  BranchStudyOptions study;
  auto* study_cmd = app.add_subcommand("branch-study", "Approximate vs GCT branching %gap (CSV)");
  study_cmd->add_option("--n", study.n);
  study_cmd->add_option("--density", study.density);
  study_cmd->add_option("--samples", study.samples);
  study_cmd->add_option("--seed", study.seed);

  GeneratorSpec gen;
  std::string family;
  int count = 1;
  std::string out_dir = ".";
  auto* gen_cmd = app.add_subcommand("gen", "Generate random instances");
  gen_cmd->add_option("family", family, "cbqp|boxqp|eiqp")->required();
  gen_cmd->add_option("--n", gen.n);
  gen_cmd->add_option("--density", gen.density);
  gen_cmd->add_option("--k", gen.cardinality, "cardinality (cbqp)");
  gen_cmd->add_option("--equalities", gen.equalities, "equality rows (eiqp)");
  gen_cmd->add_option("--integer-upper", gen.integer_upper, "variable upper bound (eiqp)");
  gen_cmd->add_option("--coef-lo", gen.coef_lo);
  gen_cmd->add_option("--coef-hi", gen.coef_hi);
  gen_cmd->add_option("--count", count);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (solve_cmd->parsed()) {
      config.relax = relax_mode_from_string(relax);
      config.branch = branch_rule_from_string(branch);
      config.record_trace = !trace_path.empty();
      const Problem p = load_instance(instance);
      const SolveResult r = solve(p, config);
      if (config.record_trace) {
        std::ofstream t(trace_path, std::ios::binary);
        if (!t) throw std::runtime_error(fmt::format("cannot write '{}'", trace_path));
        for (const auto& rec : r.trace) t << rec.to_json() << '\n';
      }
      out << solve_report_json(r, config) << '\n';
      return exit_code(r.status);
    }
    if (gaps_cmd->parsed()) {
      gaps.corpus = corpus;
      cmd_root_gaps(gaps, out, err);
      return 0;
    }
    if (study_cmd->parsed()) {
      cmd_branch_study(study, out);
      return 0;
    }
    if (gen_cmd->parsed()) {
      gen.family = family_from_string(family);
      for (const auto& path : cmd_generate(gen, count, out_dir)) err << path.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace smiqp
