#include "lipstream/kalman.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace lipstream {

namespace {

// Lower-triangular Cholesky of a 4x4 SPD matrix; false when not SPD.
bool cholesky4(const double a[4][4], double l[4][4]) {
  std::memset(l, 0, 16 * sizeof(double));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = a[i][j];
      for (int k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
      if (i == j) {
        if (sum <= 0.0 || !std::isfinite(sum)) return false;
        l[i][i] = std::sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  return true;
}

// Solve (L Lt) x = b for one right-hand side.
void chol_solve4(const double l[4][4], const double b[4], double x[4]) {
  double y[4];
  for (int i = 0; i < 4; ++i) {
    double sum = b[i];
    for (int k = 0; k < i; ++k) sum -= l[i][k] * y[k];
    y[i] = sum / l[i][i];
  }
  for (int i = 3; i >= 0; --i) {
    double sum = y[i];
    for (int k = i + 1; k < 4; ++k) sum -= l[k][i] * x[k];
    x[i] = sum / l[i][i];
  }
}

}  // namespace

KalmanBoxFilter::KalmanBoxFilter(KalmanConfig cfg) : cfg_(cfg) {
  if (cfg_.process_noise <= 0 || cfg_.measurement_noise <= 0 ||
      cfg_.initial_variance <= 0)
    throw std::invalid_argument("kalman: non-positive noise");
}

void KalmanBoxFilter::reset() {
  initialized_ = false;
  std::memset(x_, 0, sizeof x_);
  std::memset(p_, 0, sizeof p_);
}

void KalmanBoxFilter::predict(double dt_s) {
  if (dt_s < 0 || !std::isfinite(dt_s))
    throw std::invalid_argument("kalman: bad time step");
  // x = F x with F adding dt * velocity to the center.
  x_[0] += x_[4] * dt_s;
  x_[1] += x_[5] * dt_s;
  // P = F P Ft + Q, expanded for this F: only rows/cols 0,1 couple to 4,5.
  double fp[6][6];
  for (int j = 0; j < 6; ++j) {
    for (int i = 0; i < 6; ++i) fp[i][j] = p_[i][j];
    fp[0][j] += dt_s * p_[4][j];
    fp[1][j] += dt_s * p_[5][j];
  }
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) p_[i][j] = fp[i][j];
    p_[i][0] += dt_s * fp[i][4];
    p_[i][1] += dt_s * fp[i][5];
  }
  double q = cfg_.process_noise * dt_s;
  for (int i = 0; i < 6; ++i) p_[i][i] += q;
}

KalmanBoxFilter::Estimate KalmanBoxFilter::update(const FaceBox& measured,
                                                  double dt_s) {
  double z[4] = {measured.cx, measured.cy, measured.w, measured.h};
  for (double v : z)
    if (!std::isfinite(v))
      throw std::invalid_argument("kalman: non-finite measurement");
  if (!initialized_) {
    for (int i = 0; i < 4; ++i) x_[i] = z[i];
    x_[4] = x_[5] = 0.0;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        p_[i][j] = i == j ? cfg_.initial_variance : 0.0;
    initialized_ = true;
    return estimate();
  }
  predict(dt_s);

  // Innovation covariance S = P[0..3][0..3] + R.
  double s[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      s[i][j] = p_[i][j] + (i == j ? cfg_.measurement_noise : 0.0);
  double l[4][4];
  if (!cholesky4(s, l))
    throw std::runtime_error("kalman: innovation covariance not SPD");

  // Gain K = P Ht S^-1, computed as K = (S^-1 (P Ht)t)t column by column.
  double k[6][4];
  for (int i = 0; i < 6; ++i) {
    double row[4], sol[4];
    for (int j = 0; j < 4; ++j) row[j] = p_[i][j];  // (P Ht) row i
    chol_solve4(l, row, sol);
    for (int j = 0; j < 4; ++j) k[i][j] = sol[j];
  }

  double y[4];
  for (int i = 0; i < 4; ++i) y[i] = z[i] - x_[i];
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) x_[i] += k[i][j] * y[j];

  // Joseph form: P = (I - K H) P (I - K H)t + K R Kt.
  double ikh[6][6];
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      ikh[i][j] = (i == j ? 1.0 : 0.0) - (j < 4 ? k[i][j] : 0.0);
  double tmp[6][6];
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double acc = 0.0;
      for (int m = 0; m < 6; ++m) acc += ikh[i][m] * p_[m][j];
      tmp[i][j] = acc;
    }
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double acc = 0.0;
      for (int m = 0; m < 6; ++m) acc += tmp[i][m] * ikh[j][m];
      for (int m = 0; m < 4; ++m)
        acc += k[i][m] * cfg_.measurement_noise * k[j][m];
      p_[i][j] = acc;
    }
  return estimate();
}

KalmanBoxFilter::Estimate KalmanBoxFilter::coast(double dt_s) {
  if (!initialized_) throw std::logic_error("kalman: coast before update");
  predict(dt_s);
  return estimate();
}

KalmanBoxFilter::Estimate KalmanBoxFilter::estimate() const {
  Estimate e;
  e.box.cx = x_[0];
  e.box.cy = x_[1];
  e.box.w = x_[2];
  e.box.h = x_[3];
  e.vx = x_[4];
  e.vy = x_[5];
  return e;
}

bool KalmanBoxFilter::covariance_spd() const {
  if (!initialized_) return false;
  // Cholesky on the full 6x6.
  double l[6][6] = {};
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = p_[i][j];
      for (int k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
      if (i == j) {
        if (sum <= 0.0 || !std::isfinite(sum)) return false;
        l[i][i] = std::sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  return true;
}

}  // namespace lipstream
