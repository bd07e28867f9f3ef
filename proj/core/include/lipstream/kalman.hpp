#pragma once

#include "lipstream/frame_ring.hpp"

namespace lipstream {

struct KalmanConfig {
  double process_noise = 1e-2;      // per second, on every state
  double measurement_noise = 25.0;  // pixel variance of the detector
  double initial_variance = 1e6;
};

// Constant-velocity smoother for detector boxes. State is
// [cx, cy, w, h, vx, vy]; the box center moves with its velocity, width and
// height follow measurements only. Updates use the Joseph form so the
// covariance stays symmetric positive definite.
class KalmanBoxFilter {
 public:
  explicit KalmanBoxFilter(KalmanConfig cfg = {});

  struct Estimate {
    FaceBox box;
    double vx = 0, vy = 0;
  };

  bool initialized() const { return initialized_; }
  void reset();

  // Predict dt_s ahead, then fold in the measurement. The first call seeds
  // the state. Non-finite inputs throw.
  Estimate update(const FaceBox& measured, double dt_s);
  // Predict only, for frames where detection found nothing.
  Estimate coast(double dt_s);

  Estimate estimate() const;
  // Cholesky probe of the covariance; false means the filter diverged.
  bool covariance_spd() const;

 private:
  void predict(double dt_s);

  KalmanConfig cfg_;
  bool initialized_ = false;
  double x_[6] = {};
  double p_[6][6] = {};
};

}  // namespace lipstream
