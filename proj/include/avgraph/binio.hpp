#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace avgraph {

/// Raised by the binary container readers. `kind` discriminates the failure
/// so callers (and tests) can tell a bad magic from a short read.
class FormatError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, BadVersion, Truncated, BadLabel, BadRecord };

  FormatError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// All on-disk integers are little-endian regardless of host order.
namespace binio {

inline void put_u8(std::ostream& os, std::uint8_t v) {
  os.put(static_cast<char>(v));
}

inline void put_i8(std::ostream& os, std::int8_t v) {
  os.put(static_cast<char>(v));
}

inline void put_u16(std::ostream& os, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline void put_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(os, bits);
}

inline void read_exact(std::istream& is, char* dst, std::size_t n, const char* what) {
  is.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw FormatError(FormatError::Kind::Truncated,
                      std::string("truncated file while reading ") + what);
}

inline std::uint8_t get_u8(std::istream& is, const char* what) {
  char b;
  read_exact(is, &b, 1, what);
  return static_cast<std::uint8_t>(b);
}

inline std::int8_t get_i8(std::istream& is, const char* what) {
  return static_cast<std::int8_t>(get_u8(is, what));
}

inline std::uint16_t get_u16(std::istream& is, const char* what) {
  char b[2];
  read_exact(is, b, 2, what);
  return static_cast<std::uint16_t>(static_cast<std::uint8_t>(b[0])) |
         (static_cast<std::uint16_t>(static_cast<std::uint8_t>(b[1])) << 8);
}

inline std::uint32_t get_u32(std::istream& is, const char* what) {
  char b[4];
  read_exact(is, b, 4, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[i])) << (8 * i);
  return v;
}

inline std::uint64_t get_u64(std::istream& is, const char* what) {
  char b[8];
  read_exact(is, b, 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(b[i])) << (8 * i);
  return v;
}

inline float get_f32(std::istream& is, const char* what) {
  const std::uint32_t bits = get_u32(is, what);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

inline void put_string16(std::ostream& os, const std::string& s) {
  if (s.size() > 0xffff) throw std::invalid_argument("string too long for u16 prefix");
  put_u16(os, static_cast<std::uint16_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string16(std::istream& is, const char* what) {
  const std::uint16_t len = get_u16(is, what);
  std::string s(len, '\0');
  if (len > 0) read_exact(is, s.data(), len, what);
  return s;
}

}  // namespace binio
}  // namespace avgraph
