#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "lipstream/clock.hpp"

namespace lipstream {

// 128-bit identifier. Not RFC-4122 random: ids are derived deterministically
// from (seed, stream, counter) so reruns produce identical traces.
struct Uuid {
  std::array<std::uint8_t, 16> bytes{};

  static Uuid from_u64_pair(std::uint64_t hi, std::uint64_t lo);
  static Uuid parse(const std::string& text);  // canonical 8-4-4-4-12 form
  std::string to_string() const;

  bool operator==(const Uuid& o) const { return bytes == o.bytes; }
  bool operator!=(const Uuid& o) const { return bytes != o.bytes; }
  bool operator<(const Uuid& o) const { return bytes < o.bytes; }
};

struct UuidHash {
  std::size_t operator()(const Uuid& u) const;
};

// Join key for everything downstream of the segmenter. birth is the clock
// time the segment entered the pipeline; completion latency counts from it.
struct SegmentId {
  Uuid uuid;
  Timestamp birth = 0;

  bool operator==(const SegmentId& o) const {
    return uuid == o.uuid && birth == o.birth;
  }
};

}  // namespace lipstream
