#include "lipstream/wav.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lipstream {
namespace {

[[noreturn]] void fail(const std::string& path, std::size_t offset,
                       const std::string& what) {
  throw std::runtime_error("wav: " + path + ": byte " +
                           std::to_string(offset) + ": " + what);
}

std::uint32_t u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

std::uint16_t u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("wav: cannot open " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  if (data.size() < 12) fail(path, data.size(), "truncated RIFF header");
  if (std::memcmp(data.data(), "RIFF", 4) != 0)
    fail(path, 0, "not a RIFF file");
  if (std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    fail(path, 8, "not a WAVE form");

  bool have_fmt = false;
  AudioBuffer out;
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    char id[5] = {0};
    std::memcpy(id, data.data() + pos, 4);
    std::uint32_t len = u32le(data.data() + pos + 4);
    std::size_t body = pos + 8;
    if (body + len > data.size())
      fail(path, data.size(),
           std::string("unexpected end of file inside chunk '") + id + "'");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) fail(path, body, "fmt chunk too short");
      std::uint16_t format = u16le(&data[body]);
      std::uint16_t channels = u16le(&data[body + 2]);
      std::uint32_t rate = u32le(&data[body + 4]);
      std::uint16_t bits = u16le(&data[body + 14]);
      if (format != 1)
        fail(path, body, "chunk 'fmt ': not PCM (format tag " +
                             std::to_string(format) + ")");
      if (channels != 1)
        fail(path, body + 2, "chunk 'fmt ': expected mono, got " +
                                 std::to_string(channels) + " channels");
      if (bits != 16)
        fail(path, body + 14, "chunk 'fmt ': expected 16-bit samples, got " +
                                  std::to_string(bits));
      out.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) fail(path, pos, "chunk 'data' before 'fmt '");
      if (len % 2 != 0) fail(path, body, "chunk 'data': odd byte length");
      out.samples.resize(len / 2);
      for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] = static_cast<std::int16_t>(
            data[body + 2 * i] | (data[body + 2 * i + 1] << 8));
      return out;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }
  if (pos != data.size())
    fail(path, pos, "truncated chunk header");
  fail(path, data.size(), "no 'data' chunk found");
}

void write_wav(const std::string& path, const AudioBuffer& audio) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("wav: cannot create " + path);
  auto put_u32 = [&](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<char*>(b), 4);
  };
  auto put_u16 = [&](std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<char*>(b), 2);
  };
  std::uint32_t data_len = static_cast<std::uint32_t>(audio.samples.size() * 2);
  out.write("RIFF", 4);
  put_u32(36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(static_cast<std::uint32_t>(audio.sample_rate * 2));
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_len);
  for (std::int16_t s : audio.samples) {
    unsigned char b[2] = {static_cast<unsigned char>(s & 0xFF),
                          static_cast<unsigned char>((s >> 8) & 0xFF)};
    out.write(reinterpret_cast<char*>(b), 2);
  }
}

}  // namespace lipstream
