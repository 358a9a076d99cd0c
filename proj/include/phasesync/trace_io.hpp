#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "phasesync/detail/serialize.hpp"
#include "phasesync/gpm.hpp"
#include "phasesync/verify.hpp"

namespace phasesync {

inline constexpr int kTraceFormatVersion = 1;

inline std::string to_string(ZeroPolicy p) {
  switch (p) {
    case ZeroPolicy::kUnitOne:
      return "unit-one";
    case ZeroPolicy::kPreviousIterate:
      return "previous-iterate";
    case ZeroPolicy::kRandomUnit:
      return "random-unit";
  }
  return "?";
}

inline ZeroPolicy zero_policy_from_string(const std::string& s) {
  if (s == "unit-one") return ZeroPolicy::kUnitOne;
  if (s == "previous-iterate") return ZeroPolicy::kPreviousIterate;
  if (s == "random-unit") return ZeroPolicy::kRandomUnit;
  throw ConfigError("unknown zero policy: " + s);
}

namespace detail {

// JSON has no inf/nan literals; alpha = inf serializes as the string "inf"
// and NaN fields as null.
inline nlohmann::json alpha_to_json(double alpha) {
  if (std::isinf(alpha)) return "inf";
  return alpha;
}

inline double alpha_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "INF" || s == "INFINITY") return kAlphaInfinity;
    throw FormatError("malformed file: bad alpha value " + s);
  }
  return j.get<double>();
}

inline double double_or_nan(const nlohmann::json& j) {
  return j.is_null() ? kNaN : j.get<double>();
}

}  // namespace detail

inline nlohmann::json config_to_json(const GpmConfig& cfg) {
  nlohmann::json j;
  j["alpha"] = detail::alpha_to_json(cfg.alpha);
  j["max_iter"] = cfg.max_iter;
  j["rho_tol"] = cfg.rho_tol;
  j["step_tol"] = cfg.step_tol;
  j["zero_policy"] = to_string(cfg.zero_policy);
  j["record_iterates"] = cfg.record_iterates;
  j["policy_seed"] = cfg.policy_seed;
  return j;
}

inline GpmConfig config_from_json(const nlohmann::json& j) {
  GpmConfig cfg;
  try {
    cfg.alpha = detail::alpha_from_json(j.at("alpha"));
    cfg.max_iter = j.at("max_iter").get<int>();
    cfg.rho_tol = j.at("rho_tol").get<double>();
    cfg.step_tol = j.at("step_tol").get<double>();
    cfg.zero_policy = zero_policy_from_string(j.at("zero_policy"));
    cfg.record_iterates = j.at("record_iterates").get<bool>();
    cfg.policy_seed = j.at("policy_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed file: ") + e.what());
  }
  return cfg;
}

// Plot-ready per-iteration table. Columns are fixed:
// k,f,d2,dinf,rho,step_norm
inline void write_trace_csv(const IterateTrace& trace,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "k,f,d2,dinf,rho,step_norm\n";
  for (const auto& r : trace.records) {
    out << r.k << ',' << detail::format_double(r.f) << ','
        << detail::format_double(r.d2_to_truth) << ','
        << detail::format_double(r.dinf_to_truth) << ','
        << detail::format_double(r.rho) << ','
        << detail::format_double(r.step_norm) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

inline nlohmann::json trace_to_json(const IterateTrace& trace,
                                    const std::string& instance_checksum_hex,
                                    const NoiseStats* stats = nullptr) {
  nlohmann::json j;
  j["format"] = "phasesync.trace";
  j["format_version"] = kTraceFormatVersion;
  j["instance"] = {{"n", trace.n},
                   {"sigma", trace.sigma},
                   {"seed", trace.seed},
                   {"mode", to_string(trace.mode)},
                   {"checksum_fnv1a64", instance_checksum_hex}};
  j["config"] = config_to_json(trace.config);
  j["init_label"] = trace.init_label;
  if (stats != nullptr) {
    j["noise"] = {{"delta_op", stats->delta_op},
                  {"delta_zstar_inf", stats->delta_zstar_inf},
                  {"contraction_ok", stats->contraction_ok},
                  {"linear_rate_ok", stats->linear_rate_ok},
                  {"second_order_global_ok", stats->second_order_global_ok}};
  }

  nlohmann::json cols;
  auto& ks = cols["k"] = nlohmann::json::array();
  auto& fs = cols["f"] = nlohmann::json::array();
  auto& d2s = cols["d2"] = nlohmann::json::array();
  auto& dinfs = cols["dinf"] = nlohmann::json::array();
  auto& rhos = cols["rho"] = nlohmann::json::array();
  auto& steps = cols["step_norm"] = nlohmann::json::array();
  auto& ctzs = cols["ctilde_z_inf"] = nlohmann::json::array();
  auto& d2fs = cols["d2_to_final"] = nlohmann::json::array();
  for (const auto& r : trace.records) {
    ks.push_back(r.k);
    fs.push_back(r.f);
    d2s.push_back(r.d2_to_truth);
    dinfs.push_back(r.dinf_to_truth);
    rhos.push_back(r.rho);
    steps.push_back(r.step_norm);
    ctzs.push_back(r.ctilde_z_inf);
    d2fs.push_back(r.d2_to_final);
  }
  j["records"] = cols;

  j["final"] = {{"z_final", detail::base64_encode(detail::complex_vector_bytes(
                                trace.z_final))},
                {"iterations", trace.iterations},
                {"termination_reason", to_string(trace.termination_reason)}};
  if (!trace.iterates.empty()) {
    auto arr = nlohmann::json::array();
    for (const auto& z : trace.iterates) {
      arr.push_back(detail::base64_encode(detail::complex_vector_bytes(z)));
    }
    j["iterates"] = std::move(arr);
  }
  return j;
}

inline void write_trace_json(const IterateTrace& trace,
                             const std::string& instance_checksum_hex,
                             const std::string& path,
                             const NoiseStats* stats = nullptr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << trace_to_json(trace, instance_checksum_hex, stats).dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

struct LoadedTrace {
  IterateTrace trace;
  std::string instance_checksum;
};

inline LoadedTrace trace_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("format") ||
      j["format"] != "phasesync.trace") {
    throw FormatError("malformed file: not a phasesync trace");
  }
  if (!j.contains("format_version") ||
      !j["format_version"].is_number_integer()) {
    throw FormatError("malformed file: missing format_version");
  }
  if (j["format_version"].get<int>() != kTraceFormatVersion) {
    throw VersionError("unsupported version: " + j["format_version"].dump());
  }
  LoadedTrace out;
  IterateTrace& t = out.trace;
  try {
    const auto& inst = j.at("instance");
    t.n = inst.at("n").get<int>();
    t.sigma = inst.at("sigma").get<double>();
    t.seed = inst.at("seed").get<std::uint64_t>();
    t.mode = ground_truth_mode_from_string(inst.at("mode").get<std::string>());
    out.instance_checksum = inst.at("checksum_fnv1a64").get<std::string>();
    t.config = config_from_json(j.at("config"));
    t.init_label = j.at("init_label").get<std::string>();

    const auto& cols = j.at("records");
    const auto& ks = cols.at("k");
    const std::size_t m = ks.size();
    for (std::size_t i = 0; i < m; ++i) {
      IterateRecord r;
      r.k = ks[i].get<int>();
      r.f = cols.at("f")[i].get<double>();
      r.d2_to_truth = cols.at("d2")[i].get<double>();
      r.dinf_to_truth = cols.at("dinf")[i].get<double>();
      r.rho = cols.at("rho")[i].get<double>();
      r.step_norm = cols.at("step_norm")[i].get<double>();
      r.ctilde_z_inf = detail::double_or_nan(cols.at("ctilde_z_inf")[i]);
      r.d2_to_final = detail::double_or_nan(cols.at("d2_to_final")[i]);
      t.records.push_back(r);
    }

    const auto& fin = j.at("final");
    const std::vector<std::uint8_t> zb =
        detail::base64_decode(fin.at("z_final").get<std::string>());
    t.z_final = detail::complex_vector_from_bytes(zb, t.n);
    t.iterations = fin.at("iterations").get<int>();
    t.termination_reason = termination_reason_from_string(
        fin.at("termination_reason").get<std::string>());
    if (j.contains("iterates")) {
      for (const auto& s : j.at("iterates")) {
        t.iterates.push_back(detail::complex_vector_from_bytes(
            detail::base64_decode(s.get<std::string>()), t.n));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed file: ") + e.what());
  }
  if (t.records.empty()) throw FormatError("malformed file: empty trace");
  return out;
}

inline LoadedTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed file: ") + e.what());
  }
  return trace_from_json(j);
}

inline nlohmann::json report_to_json(const BoundReport& report) {
  nlohmann::json j;
  j["format"] = "phasesync.report";
  j["format_version"] = 1;
  j["noise"] = {{"delta_op", report.stats.delta_op},
                {"delta_zstar_inf", report.stats.delta_zstar_inf},
                {"contraction_ok", report.stats.contraction_ok},
                {"linear_rate_ok", report.stats.linear_rate_ok},
                {"second_order_global_ok",
                 report.stats.second_order_global_ok}};
  j["params"] = {{"mu", report.params.mu},
                 {"nu", report.params.nu},
                 {"gamma", report.params.gamma},
                 {"zeta", report.params.zeta},
                 {"omega", report.params.omega},
                 {"gamma_over_mu", report.params.gamma_over_mu},
                 {"a0", report.params.a0},
                 {"a1_cap", report.params.a1_cap},
                 {"a2_cap", report.params.a2_cap},
                 {"a1_tight", report.a1_tight},
                 {"a2_tight", report.a2_tight},
                 {"lambda_nominal", report.params.lambda_nominal}};
  j["summary"] = {{"f_star", report.f_star},
                  {"f_final", report.f_final},
                  {"d2_final", report.d2_final},
                  {"dinf_final", report.dinf_final},
                  {"rho_final", report.rho_final},
                  {"lambda_hat", report.lambda_hat},
                  {"all_applicable_passed", report.all_applicable_passed()}};
  auto arr = nlohmann::json::array();
  for (const auto& c : report.checks) {
    arr.push_back({{"name", c.name},
                   {"hypotheses", c.hypotheses},
                   {"applicable", c.applicable},
                   {"passed", c.passed},
                   {"worst_margin", c.worst_margin},
                   {"worst_k", c.worst_k},
                   {"detail", c.detail}});
  }
  j["checks"] = std::move(arr);
  return j;
}

inline void write_report_json(const BoundReport& report,
                              const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << report_to_json(report).dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

// Human-readable summary: one line per inequality with its hypotheses,
// verdict, and worst margin.
inline std::string report_to_text(const BoundReport& report) {
  std::ostringstream out;
  out << "noise: |Delta|_op=" << report.stats.delta_op
      << "  |Delta z*|_inf=" << report.stats.delta_zstar_inf
      << "  gates: contraction=" << (report.stats.contraction_ok ? "y" : "n")
      << " linear-rate=" << (report.stats.linear_rate_ok ? "y" : "n")
      << " second-order-global="
      << (report.stats.second_order_global_ok ? "y" : "n") << "\n";
  out << "constants: mu=" << report.params.mu << " nu=" << report.params.nu
      << " gamma=" << report.params.gamma << " zeta=" << report.params.zeta
      << " omega=" << report.params.omega << " a0=" << report.params.a0
      << "\n";
  out << "rates: lambda_hat=" << report.lambda_hat
      << " lambda_nominal=" << report.params.lambda_nominal << "\n";
  out << "summary: f_final=" << report.f_final
      << " d2_final=" << report.d2_final << " rho_final=" << report.rho_final
      << "\n";
  for (const auto& c : report.checks) {
    const char* verdict =
        !c.applicable ? " N/A" : (c.passed ? "PASS" : "FAIL");
    out << "[" << verdict << "] " << c.name;
    if (c.applicable) {
      out << "  worst_margin=" << c.worst_margin << " at k=" << c.worst_k;
    }
    out << "  {" << c.hypotheses << "}";
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
  }
  out << (report.all_applicable_passed() ? "ALL APPLICABLE CHECKS PASSED"
                                         : "SOME APPLICABLE CHECKS FAILED")
      << " (" << report.applicable_count() << " applicable, "
      << report.failed_count() << " failed)\n";
  return out.str();
}

}  // namespace phasesync
