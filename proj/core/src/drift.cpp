#include "lipstream/drift.hpp"

#include <cmath>
#include <stdexcept>

namespace lipstream {

DriftTracker::DriftTracker(DriftConfig cfg) : cfg_(cfg) {
  if (cfg_.alpha <= 0.0 || cfg_.alpha > 1.0)
    throw std::invalid_argument("drift: alpha outside (0, 1]");
  if (cfg_.limit_ms <= 0.0)
    throw std::invalid_argument("drift: non-positive limit");
}

bool DriftTracker::feed(double offset_ms) {
  if (!std::isfinite(offset_ms))
    throw std::invalid_argument("drift: non-finite offset");
  if (cfg_.mode == DriftMode::Raw)
    level_ = offset_ms;
  else
    level_ = (1.0 - cfg_.alpha) * level_ + cfg_.alpha * offset_ms;
  if (std::abs(level_) > cfg_.limit_ms) {
    level_ = 0.0;
    trips_ += 1;
    return true;
  }
  return false;
}

void DriftTracker::reset() { level_ = 0.0; }

}  // namespace lipstream
