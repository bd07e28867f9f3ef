#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "lipstream/clock.hpp"
#include "lipstream/uuid.hpp"

namespace lipstream {

// Append-only per-queue delivery journal. Layout: 4-byte magic "LSQ1", then
// records of
//   u32 len   little-endian, bytes after this field (25 + payload size)
//   u8  kind  0 publish, 1 ack, 2 dead-letter
//   16B uuid
//   u64 ts_ms little-endian
//   payload   publish records only
// Replaying publishes minus acks and dead-letters yields the live set.

enum class JournalKind : std::uint8_t {
  Publish = 0,
  Ack = 1,
  DeadLetter = 2,
};

struct JournalRecord {
  JournalKind kind = JournalKind::Publish;
  Uuid uuid;
  std::uint64_t ts_ms = 0;
  std::vector<std::uint8_t> payload;
};

// Default-constructed writers discard appends; benchmarks use that to take
// file IO out of the measured path.
class JournalWriter {
 public:
  JournalWriter() = default;
  explicit JournalWriter(const std::string& path);

  void append(JournalKind kind, const Uuid& uuid, Timestamp ts_ms,
              const std::uint8_t* payload = nullptr, std::size_t size = 0);
  void flush();
  bool enabled() const { return open_; }

 private:
  std::ofstream out_;
  bool open_ = false;
};

std::vector<JournalRecord> read_journal(const std::string& path);

}  // namespace lipstream
