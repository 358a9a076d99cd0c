#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "phasesync/instance_io.hpp"
#include "phasesync/trace_io.hpp"
#include "phasesync/verify.hpp"

namespace phasesync {

inline constexpr int kSweepSchemaVersion = 1;

// Noise levels are either listed outright or derived from n by a scale rule;
// the rules mirror the regimes where the bounds change character.
struct SigmaSpec {
  enum class Kind { kValues, kSqrtN, kQuarterN, kSixthN };
  Kind kind = Kind::kValues;
  std::vector<double> values;  // kValues
  double c = 1.0;              // scale rules: c * n^{1/2 | 1/4 | 1/6}

  std::vector<double> resolve(int n) const {
    switch (kind) {
      case Kind::kValues:
        return values;
      case Kind::kSqrtN:
        return {c * std::sqrt(static_cast<double>(n))};
      case Kind::kQuarterN:
        return {c * std::pow(static_cast<double>(n), 0.25)};
      case Kind::kSixthN:
        return {c * std::pow(static_cast<double>(n), 1.0 / 6.0)};
    }
    return {};
  }
};

struct SweepConfig {
  std::vector<int> n_list;
  SigmaSpec sigma;
  std::vector<double> alpha_list;
  std::uint64_t seed_begin = 1;
  int seed_count = 1;
  GroundTruthMode mode = GroundTruthMode::kRandomPhases;
  GpmConfig solver;             // alpha/step_tol specialized per grid point
  bool solver_given_step_tol = false;
  std::string output_dir = "sweep-out";
  long max_runs = 100000;
  int jobs = 0;  // 0: resolve from PHASESYNC_JOBS or hardware concurrency

  long total_runs() const {
    long total = 0;
    for (int n : n_list) {
      total += static_cast<long>(sigma.resolve(n).size()) *
               static_cast<long>(alpha_list.size()) * seed_count;
    }
    return total;
  }

  void validate() const {
    if (n_list.empty() || alpha_list.empty() || seed_count < 1) {
      throw ConfigError("sweep: empty grid");
    }
    for (int n : n_list) {
      if (n < 1) throw ConfigError("sweep: n must be >= 1");
    }
    for (double a : alpha_list) {
      if (!(a >= 2.0)) throw ConfigError("sweep: alpha must be in [2, inf]");
    }
    if (total_runs() > max_runs) {
      throw ConfigError("sweep: grid of " + std::to_string(total_runs()) +
                        " runs exceeds cap " + std::to_string(max_runs));
    }
  }
};

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  try {
    if (j.contains("schema_version") &&
        j.at("schema_version").get<int>() != kSweepSchemaVersion) {
      throw VersionError("unsupported version: " +
                         j.at("schema_version").dump());
    }
    for (const auto& v : j.at("n")) cfg.n_list.push_back(v.get<int>());
    const auto& sig = j.at("sigma");
    if (sig.contains("values")) {
      cfg.sigma.kind = SigmaSpec::Kind::kValues;
      for (const auto& v : sig.at("values")) {
        cfg.sigma.values.push_back(v.get<double>());
      }
    } else {
      const std::string rule = sig.at("rule").get<std::string>();
      cfg.sigma.c = sig.at("c").get<double>();
      if (rule == "sqrt_n") {
        cfg.sigma.kind = SigmaSpec::Kind::kSqrtN;
      } else if (rule == "n_quarter") {
        cfg.sigma.kind = SigmaSpec::Kind::kQuarterN;
      } else if (rule == "n_sixth") {
        cfg.sigma.kind = SigmaSpec::Kind::kSixthN;
      } else {
        throw ConfigError("sweep: unknown sigma rule " + rule);
      }
    }
    for (const auto& v : j.at("alpha")) {
      cfg.alpha_list.push_back(detail::alpha_from_json(v));
    }
    const auto& seeds = j.at("seeds");
    cfg.seed_begin = seeds.at("begin").get<std::uint64_t>();
    cfg.seed_count = seeds.at("count").get<int>();
    if (j.contains("mode")) {
      cfg.mode = ground_truth_mode_from_string(j.at("mode").get<std::string>());
    }
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      if (s.contains("max_iter")) cfg.solver.max_iter = s.at("max_iter").get<int>();
      if (s.contains("rho_tol")) cfg.solver.rho_tol = s.at("rho_tol").get<double>();
      if (s.contains("step_tol")) {
        cfg.solver.step_tol = s.at("step_tol").get<double>();
        cfg.solver_given_step_tol = true;
      }
      if (s.contains("zero_policy")) {
        cfg.solver.zero_policy =
            zero_policy_from_string(s.at("zero_policy").get<std::string>());
      }
      if (s.contains("record_iterates")) {
        cfg.solver.record_iterates = s.at("record_iterates").get<bool>();
      }
    }
    if (j.contains("output_dir")) {
      cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("max_runs")) cfg.max_runs = j.at("max_runs").get<long>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed config: ") + e.what());
  }
  return sweep_config_from_json(j);
}

struct SweepRow {
  long run_id = 0;
  int n = 0;
  double sigma = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double delta_op = detail::kNaN;
  double delta_zstar_inf = detail::kNaN;
  bool contraction_ok = false;
  bool linear_rate_ok = false;
  bool second_order_global_ok = false;
  int iterations = 0;
  std::string termination_reason;
  double f_final = detail::kNaN;
  double d2_final = detail::kNaN;
  double dinf_final = detail::kNaN;
  double rho_final = detail::kNaN;
  double lambda_hat = detail::kNaN;
  int checks_applicable = 0;
  int checks_failed = 0;
  std::string failed_names;  // semicolon-joined
  std::string error;         // empty on success
  double wall_ms = 0.0;      // recorded in the timings sidecar only
};

struct SweepReport {
  std::vector<SweepRow> rows;
  nlohmann::json aggregates;
};

inline const char* kSweepRowHeader =
    "run_id,n,sigma,alpha,seed,delta_op,delta_zstar_inf,contraction_ok,"
    "linear_rate_ok,second_order_global_ok,iterations,termination_reason,"
    "f_final,d2_final,dinf_final,rho_final,lambda_hat,checks_applicable,"
    "checks_failed,failed_names,error";

inline std::string sweep_row_csv(const SweepRow& r) {
  std::ostringstream out;
  out << r.run_id << ',' << r.n << ',' << detail::format_double(r.sigma) << ','
      << detail::format_double(r.alpha) << ',' << r.seed << ','
      << detail::format_double(r.delta_op) << ','
      << detail::format_double(r.delta_zstar_inf) << ','
      << (r.contraction_ok ? 1 : 0) << ',' << (r.linear_rate_ok ? 1 : 0) << ','
      << (r.second_order_global_ok ? 1 : 0) << ',' << r.iterations << ','
      << r.termination_reason << ',' << detail::format_double(r.f_final) << ','
      << detail::format_double(r.d2_final) << ','
      << detail::format_double(r.dinf_final) << ','
      << detail::format_double(r.rho_final) << ','
      << detail::format_double(r.lambda_hat) << ',' << r.checks_applicable
      << ',' << r.checks_failed << ',' << r.failed_names << ',' << r.error;
  return out.str();
}

// Executes one grid point: build, solve from the spectral initializer,
// verify. Exceptions are recorded in the row, not rethrown.
inline SweepRow run_sweep_point(long run_id, int n, double sigma, double alpha,
                                std::uint64_t seed, GroundTruthMode mode,
                                GpmConfig solver, bool solver_given_step_tol) {
  SweepRow row;
  row.run_id = run_id;
  row.n = n;
  row.sigma = sigma;
  row.alpha = alpha;
  row.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    solver.alpha = alpha;
    if (!solver_given_step_tol) {
      solver.step_tol = 1e-13 * std::sqrt(static_cast<double>(n));
    }
    const Instance inst = build_instance(n, sigma, seed, mode);
    const SolveResult solved = solve_to_maximizer(inst, solver);
    const BoundReport report = verify_run(inst, solved.trace, solver);

    row.delta_op = report.stats.delta_op;
    row.delta_zstar_inf = report.stats.delta_zstar_inf;
    row.contraction_ok = report.stats.contraction_ok;
    row.linear_rate_ok = report.stats.linear_rate_ok;
    row.second_order_global_ok = report.stats.second_order_global_ok;
    row.iterations = solved.trace.iterations;
    row.termination_reason = to_string(solved.trace.termination_reason);
    row.f_final = report.f_final;
    row.d2_final = report.d2_final;
    row.dinf_final = report.dinf_final;
    row.rho_final = report.rho_final;
    row.lambda_hat = report.lambda_hat;
    row.checks_applicable = report.applicable_count();
    row.checks_failed = report.failed_count();
    std::string failed;
    for (const auto& c : report.checks) {
      if (c.applicable && !c.passed) {
        if (!failed.empty()) failed += ';';
        failed += c.name;
      }
    }
    row.failed_names = failed;
  } catch (const std::exception& e) {
    row.error = e.what();
    row.termination_reason = "error";
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return row;
}

inline int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PHASESYNC_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Aggregates per (n, sigma, alpha) group, recomputable from the rows.
inline nlohmann::json sweep_aggregates(const std::vector<SweepRow>& rows) {
  struct Group {
    std::vector<double> d2, f, iters;
    int count = 0, errors = 0, violations = 0;
    int contraction = 0, linear_rate = 0, second_order = 0;
  };
  std::map<std::string, Group> groups;
  for (const auto& r : rows) {
    std::string key = "n=" + std::to_string(r.n) +
                      ",sigma=" + detail::format_double(r.sigma) +
                      ",alpha=" + detail::format_double(r.alpha);
    Group& g = groups[key];
    ++g.count;
    if (!r.error.empty()) {
      ++g.errors;
      continue;
    }
    g.d2.push_back(r.d2_final);
    g.f.push_back(r.f_final);
    g.iters.push_back(static_cast<double>(r.iterations));
    g.contraction += r.contraction_ok ? 1 : 0;
    g.linear_rate += r.linear_rate_ok ? 1 : 0;
    g.second_order += r.second_order_global_ok ? 1 : 0;
    g.violations += r.checks_failed > 0 ? 1 : 0;
  }
  const auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return detail::kNaN;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const auto median = [](std::vector<double> v) {
    if (v.empty()) return detail::kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : (v[m / 2 - 1] + v[m / 2]) / 2.0;
  };
  nlohmann::json out = nlohmann::json::object();
  for (auto& [key, g] : groups) {
    out[key] = {{"count", g.count},
                {"errors", g.errors},
                {"violations", g.violations},
                {"gate_pass",
                 {{"contraction_ok", g.contraction},
                  {"linear_rate_ok", g.linear_rate},
                  {"second_order_global_ok", g.second_order}}},
                {"mean_d2_final", mean(g.d2)},
                {"median_d2_final", median(g.d2)},
                {"mean_f_final", mean(g.f)},
                {"mean_iterations", mean(g.iters)}};
  }
  return out;
}

// Runs the whole grid with a bounded worker pool. Rows land in grid order
// regardless of scheduling, so repeated sweeps are byte-identical; per-run
// wall clock goes to a separate timings file to keep it that way.
inline SweepReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();

  struct Point {
    long run_id;
    int n;
    double sigma, alpha;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  long run_id = 0;
  for (int n : cfg.n_list) {
    for (double sigma : cfg.sigma.resolve(n)) {
      for (double alpha : cfg.alpha_list) {
        for (int s = 0; s < cfg.seed_count; ++s) {
          points.push_back({run_id++, n, sigma, alpha, cfg.seed_begin + s});
        }
      }
    }
  }

  SweepReport report;
  report.rows.resize(points.size());
  std::atomic<std::size_t> next{0};
  const int jobs =
      std::min<long>(resolve_jobs(cfg.jobs), static_cast<long>(points.size()));
  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      const Point& p = points[i];
      report.rows[i] =
          run_sweep_point(p.run_id, p.n, p.sigma, p.alpha, p.seed, cfg.mode,
                          cfg.solver, cfg.solver_given_step_tol);
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  report.aggregates = sweep_aggregates(report.rows);
  return report;
}

inline void write_sweep_outputs(const SweepReport& report,
                                const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);

  std::ofstream rows(dir + "/rows.csv", std::ios::binary);
  if (!rows) throw IoError("cannot open for writing: " + dir + "/rows.csv");
  rows << kSweepRowHeader << "\n";
  for (const auto& r : report.rows) rows << sweep_row_csv(r) << "\n";
  if (!rows) throw IoError("write failed: " + dir + "/rows.csv");

  std::ofstream timings(dir + "/timings.csv", std::ios::binary);
  if (!timings) {
    throw IoError("cannot open for writing: " + dir + "/timings.csv");
  }
  timings << "run_id,wall_ms\n";
  for (const auto& r : report.rows) {
    timings << r.run_id << ',' << detail::format_double(r.wall_ms) << "\n";
  }

  std::ofstream agg(dir + "/aggregates.json", std::ios::binary);
  if (!agg) {
    throw IoError("cannot open for writing: " + dir + "/aggregates.json");
  }
  agg << report.aggregates.dump(2) << "\n";
}

}  // namespace phasesync
