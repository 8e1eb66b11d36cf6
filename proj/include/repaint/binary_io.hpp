#pragma once

// Little-endian scalar encoding shared by the tensor and checkpoint formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "repaint/error.hpp"

namespace repaint::binary {

template <typename U>
void write_le(std::ostream& out, U value) {
  static_assert(std::is_unsigned_v<U>);
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xFFu);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

inline void write_u32(std::ostream& out, std::uint32_t v) { write_le(out, v); }
inline void write_u64(std::ostream& out, std::uint64_t v) { write_le(out, v); }
inline void write_f64(std::ostream& out, double v) { write_le(out, std::bit_cast<std::uint64_t>(v)); }

template <typename U>
U read_le(std::istream& in, const char* what) {
  unsigned char bytes[sizeof(U)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(U));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(U))) {
    throw IoError(std::string("truncated input while reading ") + what);
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

inline std::uint32_t read_u32(std::istream& in, const char* what) { return read_le<std::uint32_t>(in, what); }
inline std::uint64_t read_u64(std::istream& in, const char* what) { return read_le<std::uint64_t>(in, what); }
inline double read_f64(std::istream& in, const char* what) {
  return std::bit_cast<double>(read_le<std::uint64_t>(in, what));
}

inline void expect_magic(std::istream& in, const char* magic, std::size_t len, const char* what) {
  std::string got(len, '\0');
  in.read(got.data(), static_cast<std::streamsize>(len));
  if (in.gcount() != static_cast<std::streamsize>(len)) throw IoError(std::string("truncated ") + what + " header");
  if (std::memcmp(got.data(), magic, len) != 0) throw IoError(std::string("bad ") + what + " magic");
}

}  // namespace repaint::binary
