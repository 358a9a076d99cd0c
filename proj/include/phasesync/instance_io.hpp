#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "phasesync/detail/serialize.hpp"
#include "phasesync/instance.hpp"

namespace phasesync {

inline constexpr int kInstanceFormatVersion = 1;

namespace detail {

// The instance payload is the ground truth followed by the strict upper
// triangle of W in row-major order, as little-endian interleaved re/im
// float64. C is reassembled on load through the same code path as
// generation, so it matches bit-for-bit.
inline std::vector<std::uint8_t> instance_payload(const Instance& inst) {
  std::vector<std::uint8_t> bytes = complex_vector_bytes(inst.z_star.vec());
  for (int j = 0; j < inst.n; ++j) {
    for (int l = j + 1; l < inst.n; ++l) {
      append_double_le(bytes, inst.W.mat()(j, l).real());
      append_double_le(bytes, inst.W.mat()(j, l).imag());
    }
  }
  return bytes;
}

}  // namespace detail

inline std::string instance_checksum(const Instance& inst) {
  return detail::hex64(detail::fnv1a64(detail::instance_payload(inst)));
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  const std::vector<std::uint8_t> payload = detail::instance_payload(inst);
  const std::size_t z_bytes = static_cast<std::size_t>(inst.n) * 16;
  const std::vector<std::uint8_t> z_part(payload.begin(),
                                         payload.begin() + z_bytes);
  const std::vector<std::uint8_t> w_part(payload.begin() + z_bytes,
                                         payload.end());
  nlohmann::json j;
  j["format"] = "phasesync.instance";
  j["format_version"] = kInstanceFormatVersion;
  j["n"] = inst.n;
  j["sigma"] = inst.sigma;
  j["seed"] = inst.seed;
  j["mode"] = to_string(inst.mode);
  j["encoding"] = "base64/float64-le/interleaved-reim";
  j["z_star"] = detail::base64_encode(z_part);
  j["w_upper"] = detail::base64_encode(w_part);
  j["checksum_fnv1a64"] = detail::hex64(detail::fnv1a64(payload));
  return j;
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << instance_to_json(inst).dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

inline Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("format") ||
      j["format"] != "phasesync.instance") {
    throw FormatError("malformed file: not a phasesync instance");
  }
  if (!j.contains("format_version") ||
      !j["format_version"].is_number_integer()) {
    throw FormatError("malformed file: missing format_version");
  }
  if (j["format_version"].get<int>() != kInstanceFormatVersion) {
    throw VersionError("unsupported version: " +
                       j["format_version"].dump());
  }
  int n;
  double sigma;
  std::uint64_t seed;
  GroundTruthMode mode;
  std::string z_b64, w_b64, checksum;
  try {
    n = j.at("n").get<int>();
    sigma = j.at("sigma").get<double>();
    seed = j.at("seed").get<std::uint64_t>();
    mode = ground_truth_mode_from_string(j.at("mode").get<std::string>());
    z_b64 = j.at("z_star").get<std::string>();
    w_b64 = j.at("w_upper").get<std::string>();
    checksum = j.at("checksum_fnv1a64").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed file: ") + e.what());
  }
  if (n < 1) throw FormatError("malformed file: n must be >= 1");

  const std::vector<std::uint8_t> z_bytes = detail::base64_decode(z_b64);
  const std::vector<std::uint8_t> w_bytes = detail::base64_decode(w_b64);

  std::vector<std::uint8_t> payload = z_bytes;
  payload.insert(payload.end(), w_bytes.begin(), w_bytes.end());
  if (detail::hex64(detail::fnv1a64(payload)) != checksum) {
    throw ChecksumError("checksum mismatch");
  }

  CVector z = detail::complex_vector_from_bytes(z_bytes, n);
  const std::size_t pairs = static_cast<std::size_t>(n) *
                            static_cast<std::size_t>(n - 1) / 2;
  if (w_bytes.size() != pairs * 16) {
    throw FormatError("malformed file: noise payload has wrong size");
  }
  CMatrix w = CMatrix::Zero(n, n);
  std::size_t off = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) {
      w(r, c) = Complex(detail::read_double_le(w_bytes, off),
                        detail::read_double_le(w_bytes, off + 8));
      off += 16;
    }
  }
  return instance_from_parts(n, sigma, seed, mode, PhaseVector(std::move(z)),
                             HermitianMatrix::from_upper(w));
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed file: ") + e.what());
  }
  return instance_from_json(j);
}

}  // namespace phasesync
