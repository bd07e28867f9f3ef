#include "lipstream/journal.hpp"

#include <cstring>
#include <stdexcept>

namespace lipstream {

namespace {

constexpr char kMagic[4] = {'L', 'S', 'Q', '1'};
constexpr std::size_t kFixed = 1 + 16 + 8;  // kind + uuid + ts

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}

void put_u64(std::vector<std::uint8_t>& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back((v >> (8 * i)) & 0xff);
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

}  // namespace

JournalWriter::JournalWriter(const std::string& path)
    : out_(path, std::ios::binary | std::ios::trunc), open_(true) {
  if (!out_) throw std::runtime_error("journal: cannot create " + path);
  out_.write(kMagic, sizeof kMagic);
}

void JournalWriter::append(JournalKind kind, const Uuid& uuid,
                           Timestamp ts_ms, const std::uint8_t* payload,
                           std::size_t size) {
  if (!open_) return;
  if (kind != JournalKind::Publish && size != 0)
    throw std::invalid_argument("journal: payload on non-publish record");
  std::vector<std::uint8_t> rec;
  rec.reserve(4 + kFixed + size);
  put_u32(rec, static_cast<std::uint32_t>(kFixed + size));
  rec.push_back(static_cast<std::uint8_t>(kind));
  rec.insert(rec.end(), uuid.bytes.begin(), uuid.bytes.end());
  put_u64(rec, static_cast<std::uint64_t>(ts_ms));
  if (size) rec.insert(rec.end(), payload, payload + size);
  out_.write(reinterpret_cast<const char*>(rec.data()),
             static_cast<std::streamsize>(rec.size()));
  if (!out_) throw std::runtime_error("journal: write failed");
}

void JournalWriter::flush() {
  if (open_) out_.flush();
}

std::vector<JournalRecord> read_journal(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("journal: cannot open " + path);
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0)
    throw std::runtime_error("journal: " + path + ": bad magic");
  std::vector<JournalRecord> out;
  std::size_t pos = 4;
  while (pos < data.size()) {
    if (pos + 4 > data.size())
      throw std::runtime_error("journal: " + path + ": truncated length");
    std::uint32_t len = get_u32(&data[pos]);
    pos += 4;
    if (len < kFixed || pos + len > data.size())
      throw std::runtime_error("journal: " + path + ": truncated record");
    JournalRecord rec;
    std::uint8_t kind = data[pos];
    if (kind > 2)
      throw std::runtime_error("journal: " + path + ": unknown record kind");
    rec.kind = static_cast<JournalKind>(kind);
    std::memcpy(rec.uuid.bytes.data(), &data[pos + 1], 16);
    rec.ts_ms = get_u64(&data[pos + 17]);
    rec.payload.assign(data.begin() + pos + kFixed,
                       data.begin() + pos + len);
    pos += len;
    if (rec.kind != JournalKind::Publish && !rec.payload.empty())
      throw std::runtime_error("journal: " + path +
                               ": payload on non-publish record");
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace lipstream
