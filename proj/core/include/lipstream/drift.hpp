#pragma once

#include <cstdint>

namespace lipstream {

enum class DriftMode {
  Raw,   // compare each measurement directly
  Ewma,  // exponentially smoothed before comparison
};

struct DriftConfig {
  DriftMode mode = DriftMode::Ewma;
  double alpha = 0.2;       // weight of the newest measurement
  double limit_ms = 100.0;  // |level| beyond this trips a resync
};

// Watches measured audio/visual offsets and decides when accumulated drift
// warrants a resync. A trip resets the accumulator so one sustained shift
// fires once, not continuously.
class DriftTracker {
 public:
  explicit DriftTracker(DriftConfig cfg = {});

  // Returns true when this measurement trips the limit.
  bool feed(double offset_ms);

  double level() const { return level_; }
  std::int64_t trips() const { return trips_; }
  void reset();

 private:
  DriftConfig cfg_;
  double level_ = 0.0;
  std::int64_t trips_ = 0;
};

}  // namespace lipstream
