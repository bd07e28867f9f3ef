#include "lipstream/frame_ring.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lipstream {

FrameRing::FrameRing(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("FrameRing: zero capacity");
  slots_.resize(capacity_);
}

std::optional<FrameRecord> FrameRing::insert(FrameRecord rec) {
  std::lock_guard<std::mutex> lk(mu_);
  if (count_ > 0) {
    const FrameRecord& last = slots_[(head_ + count_ - 1) % capacity_];
    if (rec.ts <= last.ts)
      throw std::invalid_argument(
          "FrameRing: out-of-order insert, ts " + std::to_string(rec.ts) +
          " after " + std::to_string(last.ts));
  }
  std::optional<FrameRecord> evicted;
  if (count_ == capacity_) {
    evicted = std::move(slots_[head_]);
    slots_[head_] = std::move(rec);
    head_ = (head_ + 1) % capacity_;
  } else {
    slots_[(head_ + count_) % capacity_] = std::move(rec);
    ++count_;
  }
  return evicted;
}

std::vector<FrameRecord> FrameRing::window(Timestamp lo, Timestamp hi) const {
  std::lock_guard<std::mutex> lk(mu_);
  std::vector<FrameRecord> out;
  if (count_ == 0 || lo > hi) return out;
  // Timestamps are sorted in ring order; binary-search the first >= lo.
  std::size_t a = 0, b = count_;
  while (a < b) {
    std::size_t mid = (a + b) / 2;
    if (slots_[(head_ + mid) % capacity_].ts < lo)
      a = mid + 1;
    else
      b = mid;
  }
  for (std::size_t i = a; i < count_; ++i) {
    const FrameRecord& r = slots_[(head_ + i) % capacity_];
    if (r.ts > hi) break;
    out.push_back(r);
  }
  return out;
}

std::size_t FrameRing::size() const {
  std::lock_guard<std::mutex> lk(mu_);
  return count_;
}

std::vector<FrameRecord> read_frame_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("frames: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("frames: " + path + ": empty file");
  if (line != "frame_index,ts_ms,cx,cy,w,h,mouth_motion")
    throw std::runtime_error("frames: " + path + ": unexpected header: " + line);
  std::vector<FrameRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    while (cols.size() < 7) cols.emplace_back();
    if (cols.size() != 7)
      throw std::runtime_error("frames: " + path + ": line " +
                               std::to_string(lineno) + ": expected 7 columns");
    FrameRecord rec;
    try {
      rec.frame_index = std::stoll(cols[0]);
      rec.ts = std::stoll(cols[1]);
      if (!cols[2].empty()) {
        FaceBox box;
        box.cx = std::stod(cols[2]);
        box.cy = std::stod(cols[3]);
        box.w = std::stod(cols[4]);
        box.h = std::stod(cols[5]);
        rec.face = box;
      }
      if (!cols[6].empty()) rec.mouth_motion = std::stod(cols[6]);
    } catch (const std::exception&) {
      throw std::runtime_error("frames: " + path + ": line " +
                               std::to_string(lineno) + ": bad number");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_frame_csv(const std::string& path,
                     const std::vector<FrameRecord>& frames) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("frames: cannot create " + path);
  out << "frame_index,ts_ms,cx,cy,w,h,mouth_motion\n";
  out.precision(10);
  for (const auto& f : frames) {
    out << f.frame_index << ',' << f.ts << ',';
    if (f.face)
      out << f.face->cx << ',' << f.face->cy << ',' << f.face->w << ','
          << f.face->h;
    else
      out << ",,,";
    out << ',' << f.mouth_motion << '\n';
  }
}

}  // namespace lipstream
