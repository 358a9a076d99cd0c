#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "phasesync/errors.hpp"
#include "phasesync/phase_vector.hpp"

namespace phasesync::detail {

inline const char* kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(const std::vector<std::uint8_t>& data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= data.size()) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out.push_back(kBase64Alphabet[v & 63]);
    i += 3;
  }
  const std::size_t rem = data.size() - i;
  if (rem == 1) {
    const std::uint32_t v = data[i] << 16;
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rem == 2) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string& text) {
  static constexpr int kInvalid = -1;
  int lut[256];
  for (int& v : lut) v = kInvalid;
  for (int i = 0; i < 64; ++i) {
    lut[static_cast<unsigned char>(kBase64Alphabet[i])] = i;
  }
  if (text.size() % 4 != 0) {
    throw FormatError("malformed file: base64 length not a multiple of 4");
  }
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=') {
        vals[j] = 0;
        ++pad;
        continue;
      }
      if (pad > 0) throw FormatError("malformed file: base64 padding");
      vals[j] = lut[static_cast<unsigned char>(c)];
      if (vals[j] == kInvalid) {
        throw FormatError("malformed file: invalid base64 character");
      }
    }
    if (pad > 2) throw FormatError("malformed file: base64 padding");
    const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) |
                            (vals[2] << 6) | vals[3];
    out.push_back((v >> 16) & 0xff);
    if (pad < 2) out.push_back((v >> 8) & 0xff);
    if (pad < 1) out.push_back(v & 0xff);
  }
  return out;
}

// Doubles serialize as little-endian IEEE-754 bytes regardless of host
// endianness.
inline void append_double_le(std::vector<std::uint8_t>& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  for (int b = 0; b < 8; ++b) out.push_back((bits >> (8 * b)) & 0xff);
}

inline double read_double_le(const std::vector<std::uint8_t>& in,
                             std::size_t offset) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) {
    bits |= static_cast<std::uint64_t>(in[offset + b]) << (8 * b);
  }
  double x;
  std::memcpy(&x, &bits, sizeof(x));
  return x;
}

// Complex vectors serialize interleaved (re, im) per entry.
inline std::vector<std::uint8_t> complex_vector_bytes(const CVector& v) {
  std::vector<std::uint8_t> out;
  out.reserve(16 * static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    append_double_le(out, v(j).real());
    append_double_le(out, v(j).imag());
  }
  return out;
}

inline CVector complex_vector_from_bytes(const std::vector<std::uint8_t>& in,
                                         Eigen::Index expected_size) {
  if (in.size() != static_cast<std::size_t>(expected_size) * 16) {
    throw FormatError("malformed file: payload has wrong size");
  }
  CVector v(expected_size);
  for (Eigen::Index j = 0; j < expected_size; ++j) {
    const std::size_t off = static_cast<std::size_t>(j) * 16;
    v(j) = Complex(read_double_le(in, off), read_double_le(in, off + 8));
  }
  return v;
}

inline std::uint64_t fnv1a64(const std::vector<std::uint8_t>& data,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (const std::uint8_t byte : data) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Fixed float formatting for CSV files: round-trips exactly and is
// byte-stable across runs.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace phasesync::detail
