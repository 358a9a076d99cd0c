// Command-line front end: generate instances, run single solves, execute
// parameter sweeps, and re-verify stored traces.
//
// Exit status: 0 = all applicable checks passed, 1 = operational error,
// 2 = at least one applicable check failed.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>

#include "phasesync/phasesync.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

struct GenerateArgs {
  int n = 0;
  double sigma = 0.0;
  std::uint64_t seed = 1;
  std::string mode = "random-phases";
  std::string out = "instance.json";
};

struct SolveArgs {
  std::string instance_path;
  int n = 0;
  double sigma = 0.0;
  std::uint64_t seed = 1;
  std::string mode = "random-phases";
  std::string alpha = "4";
  double rho_tol = 1e-12;
  double step_tol = -1.0;  // <0: derive 1e-13 sqrt(n)
  int max_iter = 10000;
  bool record_iterates = false;
  std::string out_dir = ".";
  std::string tag = "run";
};

struct SweepArgs {
  std::string config_path;
  int jobs = 0;
  std::string out_dir;
};

struct VerifyArgs {
  std::string trace_path;
  std::string instance_path;
  std::string out;
};

double parse_alpha(const std::string& s) {
  if (s == "inf" || s == "INF" || s == "INFINITY") {
    return phasesync::kAlphaInfinity;
  }
  return std::stod(s);
}

void print_noise(const phasesync::NoiseStats& stats, int n, double sigma) {
  std::cout << "|Delta|_op = " << stats.delta_op
            << "   (contraction gate n/16 = " << n / 16.0 << ")\n"
            << "|Delta z*|_inf = " << stats.delta_zstar_inf << "\n"
            << "gates: contraction_ok=" << stats.contraction_ok
            << " linear_rate_ok=" << stats.linear_rate_ok
            << " second_order_global_ok=" << stats.second_order_global_ok
            << "\n";
  const double band = 3.0 * sigma * std::sqrt(static_cast<double>(n));
  if (sigma > 0.0 && stats.delta_op > band) {
    std::cerr << "warning: |Delta|_op = " << stats.delta_op
              << " exceeds the 3 sigma sqrt(n) band " << band
              << " (an unusually large noise draw)\n";
  }
}

int cmd_generate(const GenerateArgs& args) {
  const phasesync::Instance inst = phasesync::build_instance(
      args.n, args.sigma, args.seed,
      phasesync::ground_truth_mode_from_string(args.mode));
  phasesync::save_instance(inst, args.out);
  std::cout << "wrote " << args.out << " (n=" << inst.n
            << ", sigma=" << inst.sigma << ", seed=" << inst.seed << ")\n";
  print_noise(phasesync::noise_stats(inst), inst.n);
  return kExitOk;
}

int cmd_solve(const SolveArgs& args) {
  phasesync::Instance inst =
      !args.instance_path.empty()
          ? phasesync::load_instance(args.instance_path)
          : phasesync::build_instance(
                args.n, args.sigma, args.seed,
                phasesync::ground_truth_mode_from_string(args.mode));

  phasesync::GpmConfig cfg = phasesync::GpmConfig::defaults(inst.n);
  cfg.alpha = parse_alpha(args.alpha);
  cfg.rho_tol = args.rho_tol;
  if (args.step_tol >= 0.0) cfg.step_tol = args.step_tol;
  cfg.max_iter = args.max_iter;
  cfg.record_iterates = args.record_iterates;

  const phasesync::SolveResult solved = phasesync::solve_to_maximizer(inst, cfg);
  const phasesync::BoundReport report =
      phasesync::verify_run(inst, solved.trace, cfg);

  std::filesystem::create_directories(args.out_dir);
  const std::string base = args.out_dir + "/" + args.tag;
  const std::string checksum = phasesync::instance_checksum(inst);
  phasesync::write_trace_csv(solved.trace, base + ".trace.csv");
  phasesync::write_trace_json(solved.trace, checksum, base + ".trace.json",
                              &report.stats);
  phasesync::write_report_json(report, base + ".report.json");
  {
    std::ofstream txt(base + ".report.txt", std::ios::binary);
    if (!txt) throw phasesync::IoError("cannot write " + base + ".report.txt");
    txt << phasesync::report_to_text(report);
  }

  std::cout << "solution: " << solved.label << " after "
            << solved.trace.iterations << " iterations ("
            << phasesync::to_string(solved.trace.termination_reason) << ")\n";
  print_noise(report.stats, inst.n);
  std::cout << phasesync::report_to_text(report);
  std::cout << "wrote " << base << ".trace.{csv,json} and " << base
            << ".report.{json,txt}\n";
  return report.all_applicable_passed() ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const SweepArgs& args) {
  phasesync::SweepConfig cfg = phasesync::load_sweep_config(args.config_path);
  if (args.jobs > 0) cfg.jobs = args.jobs;
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;

  const phasesync::SweepReport report = phasesync::run_sweep(cfg);
  phasesync::write_sweep_outputs(report, cfg.output_dir);

  long errors = 0, violations = 0;
  for (const auto& row : report.rows) {
    errors += row.error.empty() ? 0 : 1;
    violations += row.checks_failed > 0 ? 1 : 0;
  }
  std::cout << "sweep: " << report.rows.size() << " runs, " << errors
            << " errors, " << violations
            << " runs with failed applicable checks\n"
            << "wrote " << cfg.output_dir
            << "/{rows.csv,aggregates.json,timings.csv}\n";
  if (errors > 0) return kExitError;
  return violations == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const VerifyArgs& args) {
  const phasesync::LoadedTrace loaded = phasesync::load_trace(args.trace_path);
  const phasesync::Instance inst =
      phasesync::load_instance(args.instance_path);
  if (phasesync::instance_checksum(inst) != loaded.instance_checksum) {
    throw phasesync::MismatchError(
        "trace was produced from a different instance (checksum mismatch)");
  }
  const phasesync::BoundReport report =
      phasesync::verify_run(inst, loaded.trace, loaded.trace.config);
  if (!args.out.empty()) phasesync::write_report_json(report, args.out);
  std::cout << phasesync::report_to_text(report);
  return report.all_applicable_passed() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase synchronization via the generalized power method"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand(
      "generate", "Generate a synthetic instance and write it to JSON");
  generate->add_option("--n", gen.n, "dimension (>= 1)")->required();
  generate->add_option("--sigma", gen.sigma, "noise level (>= 0)")->required();
  generate->add_option("--seed", gen.seed, "64-bit seed");
  generate->add_option("--mode", gen.mode,
                       "ground truth: random-phases | all-ones");
  generate->add_option("--out", gen.out, "output path");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand(
      "solve", "Spectral initialization + GPM + bound verification");
  solve_cmd->add_option("--instance", solve.instance_path,
                        "instance file (otherwise build from --n/--sigma/--seed)");
  solve_cmd->add_option("--n", solve.n, "dimension");
  solve_cmd->add_option("--sigma", solve.sigma, "noise level");
  solve_cmd->add_option("--seed", solve.seed, "64-bit seed");
  solve_cmd->add_option("--mode", solve.mode, "ground truth mode");
  solve_cmd->add_option("--alpha", solve.alpha, "step size in [2, inf]; 'inf' for the pure power update");
  solve_cmd->add_option("--rho-tol", solve.rho_tol,
                        "stop when rho(z) <= rho_tol * n");
  solve_cmd->add_option("--step-tol", solve.step_tol,
                        "stop when the step length <= step_tol");
  solve_cmd->add_option("--max-iter", solve.max_iter, "iteration cap");
  solve_cmd->add_flag("--record-iterates", solve.record_iterates,
                      "store full iterates in the trace JSON");
  solve_cmd->add_option("--out-dir", solve.out_dir, "output directory");
  solve_cmd->add_option("--tag", solve.tag, "output file prefix");

  SweepArgs sweep;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run an (n, sigma, alpha, seed) grid");
  sweep_cmd->add_option("--config", sweep.config_path, "sweep config JSON")
      ->required();
  sweep_cmd->add_option("--jobs", sweep.jobs,
                        "worker count (default: config, then PHASESYNC_JOBS, "
                        "then processor count)");
  sweep_cmd->add_option("--out-dir", sweep.out_dir,
                        "override the config's output directory");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand(
      "verify", "Re-verify a stored trace against its instance");
  verify_cmd->add_option("--trace", verify.trace_path, "trace JSON")
      ->required();
  verify_cmd->add_option("--instance", verify.instance_path, "instance JSON")
      ->required();
  verify_cmd->add_option("--out", verify.out, "write the report JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (solve_cmd->parsed()) return cmd_solve(solve);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep);
    if (verify_cmd->parsed()) return cmd_verify(verify);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
