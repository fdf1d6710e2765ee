#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "rrlab/errors.hpp"

// Little-endian primitives for the binary snapshot/checkpoint formats.
namespace rrlab::io {

inline void put_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_i64(std::ostream& os, int64_t v) { put_u64(os, static_cast<uint64_t>(v)); }
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<uint64_t>(v)); }
inline void put_u8(std::ostream& os, uint8_t v) {
  os.write(reinterpret_cast<const char*>(&v), 1);
}

inline void put_string(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void put_f64_vec(std::ostream& os, const std::vector<double>& v) {
  put_u64(os, v.size());
  for (double x : v) put_f64(os, x);
}

inline uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError("unexpected end of stream");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

inline uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw IoError("unexpected end of stream");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

inline int64_t get_i64(std::istream& is) { return static_cast<int64_t>(get_u64(is)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

inline uint8_t get_u8(std::istream& is) {
  char c;
  if (!is.read(&c, 1)) throw IoError("unexpected end of stream");
  return static_cast<uint8_t>(c);
}

inline std::string get_string(std::istream& is) {
  uint64_t n = get_u64(is);
  std::string s(n, '\0');
  if (n && !is.read(s.data(), static_cast<std::streamsize>(n)))
    throw IoError("unexpected end of stream");
  return s;
}

inline std::vector<double> get_f64_vec(std::istream& is) {
  uint64_t n = get_u64(is);
  std::vector<double> v(n);
  for (uint64_t i = 0; i < n; ++i) v[i] = get_f64(is);
  return v;
}

inline void expect_magic(std::istream& is, uint32_t magic, const char* what) {
  if (get_u32(is) != magic) throw IoError(std::string("bad magic for ") + what);
}

}  // namespace rrlab::io
