#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lipstream/clock.hpp"

namespace lipstream {

struct FaceBox {
  double cx = 0, cy = 0, w = 0, h = 0;
};

struct FrameRecord {
  Timestamp ts = 0;
  std::int64_t frame_index = 0;
  std::optional<FaceBox> face;
  double mouth_motion = 0;  // scalar activity; simulation carries it directly
  std::optional<std::array<std::pair<double, double>, 5>> landmarks;
  // Optional grayscale plane for the pixel motion path; absent in simulation.
  std::shared_ptr<const std::vector<std::uint8_t>> pixels;
  int pix_w = 0, pix_h = 0;
};

// Last N frames (10 s at 30 fps by default). Single writer, ordered
// timestamps; inserting into a full ring evicts the oldest record.
class FrameRing {
 public:
  explicit FrameRing(std::size_t capacity = 300);

  // Returns the evicted record when the ring was full. Throws on a
  // timestamp that does not strictly increase.
  std::optional<FrameRecord> insert(FrameRecord rec);

  // All records with lo <= ts <= hi, in timestamp order.
  std::vector<FrameRecord> window(Timestamp lo, Timestamp hi) const;

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

 private:
  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::vector<FrameRecord> slots_;
  std::size_t head_ = 0;  // index of oldest record
  std::size_t count_ = 0;
};

// Simulation frame files: CSV `frame_index,ts_ms,cx,cy,w,h,mouth_motion`.
// Records without a face leave cx..h empty.
std::vector<FrameRecord> read_frame_csv(const std::string& path);
void write_frame_csv(const std::string& path,
                     const std::vector<FrameRecord>& frames);

}  // namespace lipstream
