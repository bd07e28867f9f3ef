#include "lipstream/uuid.hpp"

#include <cstdio>
#include <stdexcept>

namespace lipstream {

Uuid Uuid::from_u64_pair(std::uint64_t hi, std::uint64_t lo) {
  Uuid u;
  for (int i = 0; i < 8; ++i) {
    u.bytes[i] = static_cast<std::uint8_t>(hi >> (56 - 8 * i));
    u.bytes[8 + i] = static_cast<std::uint8_t>(lo >> (56 - 8 * i));
  }
  return u;
}

std::string Uuid::to_string() const {
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(36);
  for (int i = 0; i < 16; ++i) {
    if (i == 4 || i == 6 || i == 8 || i == 10) s.push_back('-');
    s.push_back(hex[bytes[i] >> 4]);
    s.push_back(hex[bytes[i] & 0xF]);
  }
  return s;
}

Uuid Uuid::parse(const std::string& text) {
  if (text.size() != 36)
    throw std::invalid_argument("Uuid::parse: expected 36 chars");
  Uuid u;
  int bi = 0;
  for (std::size_t i = 0; i < text.size();) {
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (text[i] != '-') throw std::invalid_argument("Uuid::parse: bad dash");
      ++i;
      continue;
    }
    auto nib = [&](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      throw std::invalid_argument("Uuid::parse: bad hex digit");
    };
    u.bytes[bi++] = static_cast<std::uint8_t>(nib(text[i]) << 4 | nib(text[i + 1]));
    i += 2;
  }
  return u;
}

std::size_t UuidHash::operator()(const Uuid& u) const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (auto b : u.bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

}  // namespace lipstream
