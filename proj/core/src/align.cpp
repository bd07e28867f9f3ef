#include "lipstream/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace lipstream {

std::vector<double> energy_envelope_ms(const AudioBuffer& audio) {
  const DurationMs total = audio.duration_ms();
  std::vector<double> env(static_cast<std::size_t>(std::max<DurationMs>(
      total, 0)));
  if (env.empty()) return env;
  const int sr = audio.sample_rate;
  const std::int64_t hop_samples = std::int64_t(sr) * 10 / 1000;
  if (hop_samples <= 0) throw std::invalid_argument("align: rate too low");
  const auto n = std::int64_t(audio.samples.size());
  for (DurationMs t = 0; t < total; t += 10) {
    std::int64_t s0 = t / 10 * hop_samples;
    std::int64_t s1 = std::min(n, s0 + hop_samples);
    double sumsq = 0.0;
    for (std::int64_t s = s0; s < s1; ++s) {
      double v = audio.samples[std::size_t(s)] / 32768.0;
      sumsq += v * v;
    }
    double rms = s1 > s0 ? std::sqrt(sumsq / double(s1 - s0)) : 0.0;
    for (DurationMs k = t; k < std::min<DurationMs>(t + 10, total); ++k)
      env[std::size_t(k)] = rms;
  }
  return env;
}

std::vector<double> motion_envelope_ms(const std::vector<FrameRecord>& frames,
                                       Timestamp t0, DurationMs span) {
  if (span < 0) throw std::invalid_argument("align: negative span");
  std::vector<double> env(static_cast<std::size_t>(span), 0.0);
  std::size_t f = 0;
  double held = 0.0;
  bool have = false;
  for (DurationMs t = 0; t < span; ++t) {
    while (f < frames.size() && frames[f].ts <= t0 + t) {
      held = frames[f].mouth_motion;
      have = true;
      ++f;
    }
    env[std::size_t(t)] = have ? held : 0.0;
  }
  return env;
}

AlignResult align_envelopes(const std::vector<double>& energy,
                            const std::vector<double>& motion,
                            DurationMs max_lag) {
  if (max_lag < 0) throw std::invalid_argument("align: negative lag bound");
  AlignResult res;
  const auto d = std::int64_t(std::min(energy.size(), motion.size()));
  const std::int64_t lo = max_lag;
  const std::int64_t hi = d - max_lag;  // exclusive
  if (hi - lo < 2) {
    res.low_confidence = true;
    return res;
  }

  const double n = double(hi - lo);
  double e_mean = 0.0;
  for (std::int64_t t = lo; t < hi; ++t) e_mean += energy[std::size_t(t)];
  e_mean /= n;
  double e_var = 0.0;
  for (std::int64_t t = lo; t < hi; ++t) {
    double v = energy[std::size_t(t)] - e_mean;
    e_var += v * v;
  }
  double e_sigma = std::sqrt(e_var);
  if (e_sigma < 1e-12) {
    res.low_confidence = true;
    return res;
  }

  bool any = false;
  double best = 0.0;
  DurationMs best_lag = 0;
  for (DurationMs lag = -max_lag; lag <= max_lag; ++lag) {
    double m_mean = 0.0;
    for (std::int64_t t = lo; t < hi; ++t)
      m_mean += motion[std::size_t(t + lag)];
    m_mean /= n;
    double m_var = 0.0, dot = 0.0;
    for (std::int64_t t = lo; t < hi; ++t) {
      double me = motion[std::size_t(t + lag)] - m_mean;
      m_var += me * me;
      dot += (energy[std::size_t(t)] - e_mean) * me;
    }
    double m_sigma = std::sqrt(m_var);
    if (m_sigma < 1e-12) continue;
    double corr = dot / (e_sigma * m_sigma);
    bool better = !any || corr > best;
    if (any && corr == best) {
      // Plateau: prefer the smaller shift, then the negative one.
      better = std::llabs(lag) < std::llabs(best_lag) ||
               (std::llabs(lag) == std::llabs(best_lag) && lag < best_lag);
    }
    if (better) {
      any = true;
      best = corr;
      best_lag = lag;
    }
  }
  if (!any) {
    res.low_confidence = true;
    return res;
  }
  res.offset_ms = best_lag;
  res.peak_corr = best;
  return res;
}

}  // namespace lipstream
